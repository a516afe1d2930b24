// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/common/memory.hpp"

#include <cstring>
#include <sstream>

namespace acs {

std::uint32_t Memory::load32(std::uint32_t addr) const {
    return static_cast<std::uint32_t>(load8(addr)) | (static_cast<std::uint32_t>(load8(addr + 1)) << 8) |
           (static_cast<std::uint32_t>(load8(addr + 2)) << 16) | (static_cast<std::uint32_t>(load8(addr + 3)) << 24);
}

void Memory::store32(std::uint32_t addr, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) store8(addr + i, static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint16_t Memory::load16(std::uint32_t addr) const {
    return static_cast<std::uint16_t>(load8(addr) | (load8(addr + 1) << 8));
}

void Memory::store16(std::uint32_t addr, std::uint16_t value) {
    store8(addr, static_cast<std::uint8_t>(value));
    store8(addr + 1, static_cast<std::uint8_t>(value >> 8));
}

void Memory::write_words(std::uint32_t addr, std::span<const std::uint32_t> words) {
    for (std::size_t i = 0; i < words.size(); ++i) store32(addr + 4 * static_cast<std::uint32_t>(i), words[i]);
}

std::vector<std::uint32_t> Memory::read_words(std::uint32_t addr, std::size_t count) const {
    std::vector<std::uint32_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = load32(addr + 4 * static_cast<std::uint32_t>(i));
    return out;
}

bool FlatMemory::contains(std::uint32_t addr, std::size_t len) const {
    return addr >= base_ && static_cast<std::uint64_t>(addr - base_) + len <= bytes_.size();
}

std::size_t FlatMemory::offset(std::uint32_t addr, std::size_t len) const {
    if (!contains(addr, len)) {
        std::ostringstream os;
        os << "address 0x" << std::hex << addr << " outside memory [0x" << base_ << ", 0x" << (base_ + bytes_.size())
           << ")";
        throw DomainError(os.str());
    }
    return addr - base_;
}

std::uint32_t FlatMemory::load32(std::uint32_t addr) const {
    std::uint32_t v;
    std::memcpy(&v, &bytes_[offset(addr, 4)], 4);
    return v;
}

void FlatMemory::store32(std::uint32_t addr, std::uint32_t value) {
    std::memcpy(&bytes_[offset(addr, 4)], &value, 4);
}

}  // namespace acs
