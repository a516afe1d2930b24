// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/quant/io.hpp"

#include <fstream>

#include <json.hpp>

namespace acs::quant {

namespace fs = std::filesystem;

namespace {

void write_le32(std::ofstream& os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                       static_cast<char>(v >> 24)};
    os.write(b, 4);
}

std::vector<std::uint32_t> read_all_le32(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) throw FormatError(path.string() + ": length is not a multiple of 4 bytes");
    std::vector<std::uint32_t> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto* p = reinterpret_cast<const unsigned char*>(&bytes[4 * i]);
        out[i] = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    }
    return out;
}

}  // namespace

void save_words(const std::vector<std::uint32_t>& words, const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write " + path.string());
    for (auto w : words) write_le32(os, w);
}

std::vector<std::uint32_t> load_words(const fs::path& path) { return read_all_le32(path); }

void save_qtensor(const QTensor& t, const fs::path& header_path) {
    fs::path data_path = header_path;
    data_path.replace_extension(".bin");
    nlohmann::json j;
    j["shape"] = t.shape();
    j["bitwidth"] = t.bitwidth().bits();
    j["signed"] = t.is_signed();
    j["data"] = data_path.filename().string();
    std::ofstream os(header_path);
    if (!os) throw FormatError("cannot write " + header_path.string());
    os << j.dump(2) << '\n';
    std::vector<std::uint32_t> words(t.data().begin(), t.data().end());
    save_words(words, data_path);
}

QTensor load_qtensor(const fs::path& header_path) {
    std::ifstream is(header_path);
    if (!is) throw FormatError("cannot open " + header_path.string());
    nlohmann::json j;
    try {
        is >> j;
        auto shape = j.at("shape").get<std::vector<int>>();
        BitWidth bits(j.at("bitwidth").get<int>());
        bool sgn = j.value("signed", false);
        auto raw = read_all_le32(header_path.parent_path() / j.at("data").get<std::string>());
        std::vector<std::int32_t> data(raw.begin(), raw.end());
        return QTensor(std::move(shape), std::move(data), bits, sgn);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(header_path.string() + ": " + e.what());
    }
}

}  // namespace acs::quant
