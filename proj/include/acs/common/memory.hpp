// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acs/common/error.hpp"

namespace acs {

/// Byte-addressable little-endian memory as seen by cores and engines.
class Memory {
public:
    virtual ~Memory() = default;

    virtual std::uint8_t load8(std::uint32_t addr) const = 0;
    virtual void store8(std::uint32_t addr, std::uint8_t value) = 0;

    virtual std::uint32_t load32(std::uint32_t addr) const;
    virtual void store32(std::uint32_t addr, std::uint32_t value);
    std::uint16_t load16(std::uint32_t addr) const;
    void store16(std::uint32_t addr, std::uint16_t value);

    void write_words(std::uint32_t addr, std::span<const std::uint32_t> words);
    std::vector<std::uint32_t> read_words(std::uint32_t addr, std::size_t count) const;
};

/// Contiguous RAM mapped at [base, base + size).
class FlatMemory : public Memory {
public:
    FlatMemory(std::uint32_t base, std::size_t size) : base_(base), bytes_(size, 0) {}

    std::uint8_t load8(std::uint32_t addr) const override { return bytes_[offset(addr, 1)]; }
    void store8(std::uint32_t addr, std::uint8_t value) override { bytes_[offset(addr, 1)] = value; }
    std::uint32_t load32(std::uint32_t addr) const override;
    void store32(std::uint32_t addr, std::uint32_t value) override;

    std::uint32_t base() const { return base_; }
    std::size_t size() const { return bytes_.size(); }
    bool contains(std::uint32_t addr, std::size_t len) const;

    std::span<const std::uint8_t> bytes() const { return bytes_; }
    std::span<std::uint8_t> bytes() { return bytes_; }

private:
    std::size_t offset(std::uint32_t addr, std::size_t len) const;

    std::uint32_t base_;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace acs
