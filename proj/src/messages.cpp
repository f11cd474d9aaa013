#include "manetsim/messages.hpp"

#include <algorithm>

namespace manetsim {

bool SourceRoute::traverses(LinkId link) const
{
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
        if (LinkId::of(hops[i], hops[i + 1]) == link) {
            return true;
        }
    }
    return false;
}

bool SourceRoute::contains(NodeId n) const
{
    return std::find(hops.begin(), hops.end(), n) != hops.end();
}

namespace {

// Header sizes loosely follow the OLSR packet format: 4 byte packet header,
// 12 byte message header, 4 bytes per address.
constexpr std::uint32_t kPacketHeader = 4;
constexpr std::uint32_t kMessageHeader = 12;
constexpr std::uint32_t kAddr = 4;

struct SizeOf {
    std::uint32_t operator()(const HelloMessage& m) const
    {
        return kPacketHeader + kMessageHeader + 4 + kAddr * static_cast<std::uint32_t>(m.entries.size());
    }
    std::uint32_t operator()(const TcMessage& m) const
    {
        return kPacketHeader + kMessageHeader + 4 + kAddr * static_cast<std::uint32_t>(m.advertised.size());
    }
    std::uint32_t operator()(const RerrNotif& m) const
    {
        return kPacketHeader + kMessageHeader + 3 * kAddr + kAddr * static_cast<std::uint32_t>(m.reverse_route.size());
    }
    std::uint32_t operator()(const DataPacket& m) const
    {
        const std::uint32_t route = m.route ? kAddr * static_cast<std::uint32_t>(m.route->hops.size()) : 0;
        return m.size + route;
    }
    std::uint32_t operator()(const DrEnvelope& m) const
    {
        return (*this)(m.original) + kMessageHeader +
               2 * kAddr * static_cast<std::uint32_t>(m.embedded_topology.size()) +
               kAddr * static_cast<std::uint32_t>(m.reverse_route.size());
    }
};

} // namespace

std::uint32_t wire_size(const Message& m)
{
    return std::visit(SizeOf{}, m);
}

} // namespace manetsim
