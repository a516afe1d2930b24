// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/cluster/dma.hpp"

#include <algorithm>

namespace acs::cluster {

std::uint64_t DmaDescriptor::bytes() const {
    std::uint64_t n = length;
    for (const auto& d : outer) n *= d.count;
    return n;
}

std::pair<std::uint32_t, std::uint32_t> DmaDescriptor::byte_addr(std::uint64_t n) const {
    std::uint32_t s = src + static_cast<std::uint32_t>(n % length), t = dst + static_cast<std::uint32_t>(n % length);
    n /= length;
    for (const auto& d : outer) {
        const auto i = static_cast<std::uint32_t>(n % d.count);
        s += i * d.src_stride;
        t += i * d.dst_stride;
        n /= d.count;
    }
    return {s, t};
}

void validate(const DmaDescriptor& d) {
    if (d.outer.size() > 2) throw ValidationError("DMA descriptor has more than 3 dimensions");
    if (d.bytes() == 0) throw ValidationError("DMA descriptor moves 0 bytes");
    const bool in = d.direction == DmaDirection::L2ToL1;
    std::uint64_t src_span = d.length, dst_span = d.length;
    for (const auto& o : d.outer) {
        src_span += std::uint64_t{o.count - 1} * o.src_stride;
        dst_span += std::uint64_t{o.count - 1} * o.dst_stride;
    }
    auto inside = [](std::uint32_t base, std::uint64_t span, bool l1) {
        const std::uint64_t lo = l1 ? TcdmGeometry::base : L2Geometry::base;
        const std::uint64_t hi = lo + (l1 ? TcdmGeometry::size : L2Geometry::size);
        return base >= lo && base + span <= hi;
    };
    if (!inside(d.src, src_span, !in)) throw ValidationError("DMA source region outside " + std::string(in ? "L2" : "L1"));
    if (!inside(d.dst, dst_span, in))
        throw ValidationError("DMA destination region outside " + std::string(in ? "L1" : "L2"));
}

std::uint64_t dma_cycles(const DmaDescriptor& d, const DmaTiming& t) {
    validate(d);
    return dma_cycles(std::uint64_t(d.bytes()), t);
}

std::uint64_t dma_cycles(std::uint64_t bytes, const DmaTiming& t) {
    const auto bpc = static_cast<std::uint64_t>(t.bytes_per_cycle);
    return (bytes + bpc - 1) / bpc + static_cast<std::uint64_t>(t.setup_cycles);
}

nlohmann::json to_json(const DmaDescriptor& d) {
    nlohmann::ordered_json j;
    j["direction"] = d.direction == DmaDirection::L2ToL1 ? "l2_to_l1" : "l1_to_l2";
    j["src"] = d.src;
    j["dst"] = d.dst;
    j["length"] = d.length;
    j["outer"] = nlohmann::json::array();
    for (const auto& o : d.outer)
        j["outer"].push_back({{"count", o.count}, {"src_stride", o.src_stride}, {"dst_stride", o.dst_stride}});
    return j;
}

DmaDescriptor dma_from_json(const nlohmann::json& j) {
    try {
        DmaDescriptor d;
        const auto dir = j.at("direction").get<std::string>();
        if (dir != "l2_to_l1" && dir != "l1_to_l2") throw ValidationError("DMA direction must be l2_to_l1 or l1_to_l2");
        d.direction = dir == "l2_to_l1" ? DmaDirection::L2ToL1 : DmaDirection::L1ToL2;
        d.src = j.at("src").get<std::uint32_t>();
        d.dst = j.at("dst").get<std::uint32_t>();
        d.length = j.at("length").get<std::uint32_t>();
        for (const auto& o : j.value("outer", nlohmann::json::array()))
            d.outer.push_back({o.at("count").get<std::uint32_t>(), o.value("src_stride", 0u), o.value("dst_stride", 0u)});
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed DMA descriptor: ") + e.what());
    }
}

void DmaChannel::push(int id, const DmaDescriptor& d) {
    validate(d);
    queue_.emplace_back(id, d);
}

void DmaChannel::start_beat() {
    auto& a = *active_;
    a.beat_words.clear();
    const std::uint64_t end = std::min<std::uint64_t>(a.desc.bytes(), a.offset + static_cast<std::uint64_t>(timing_.bytes_per_cycle));
    const bool l1_is_dst = a.desc.direction == DmaDirection::L2ToL1;
    for (std::uint64_t n = a.offset; n < end; ++n) {
        const auto [s, t] = a.desc.byte_addr(n);
        const std::uint32_t w = (l1_is_dst ? t : s) & ~3u;
        if (std::find(a.beat_words.begin(), a.beat_words.end(), w) == a.beat_words.end()) a.beat_words.push_back(w);
    }
    a.beat_done.assign(a.beat_words.size(), false);
    words_requested_ += a.beat_words.size();
}

std::vector<LicRequest> DmaChannel::requests() {
    req_map_.clear();
    std::vector<LicRequest> out;
    if (!active_ && !queue_.empty()) {
        auto [id, d] = queue_.front();
        queue_.pop_front();
        active_ = Active{id, d, static_cast<std::uint64_t>(timing_.setup_cycles), 0, {}, {}};
        if (active_->setup_left == 0) start_beat();
    }
    if (!active_ || active_->setup_left > 0) return out;
    for (std::size_t i = 0; i < active_->beat_words.size(); ++i)
        if (!active_->beat_done[i]) {
            out.push_back({master_, active_->beat_words[i]});
            req_map_.push_back(i);
        }
    return out;
}

std::optional<int> DmaChannel::tick(const std::vector<bool>& granted, Memory& mem) {
    if (!active_) return std::nullopt;
    ++busy_;
    auto& a = *active_;
    if (a.setup_left > 0) {
        if (--a.setup_left == 0) start_beat();
        return std::nullopt;
    }
    bool all = true;
    for (std::size_t r = 0; r < req_map_.size(); ++r) {
        if (granted.at(r)) {
            a.beat_done[req_map_[r]] = true;
            ++words_granted_;
        }
    }
    for (bool b : a.beat_done) all = all && b;
    if (!all) {
        ++stalls_;
        return std::nullopt;
    }
    const std::uint64_t end = std::min<std::uint64_t>(a.desc.bytes(), a.offset + static_cast<std::uint64_t>(timing_.bytes_per_cycle));
    for (std::uint64_t n = a.offset; n < end; ++n) {
        const auto [s, t] = a.desc.byte_addr(n);
        mem.store8(t, mem.load8(s));
    }
    a.offset = end;
    if (a.offset >= a.desc.bytes()) {
        const int id = a.id;
        active_.reset();
        return id;
    }
    start_beat();
    return std::nullopt;
}

}  // namespace acs::cluster
