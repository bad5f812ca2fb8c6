// Copyright 2026 The SlsBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slsbench/zip_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "slsbench/error.hpp"

namespace slsbench::zip {
namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralSig = 0x06054b50;
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kUtf8Flag = 0x0800;
constexpr std::uint16_t kMethodStore = 0;
constexpr std::uint16_t kMethodDeflate = 8;
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

class ByteWriter {
public:
    void u16(std::uint16_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v));
        u16(static_cast<std::uint16_t>(v >> 16));
    }
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t>& buffer() { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

std::uint16_t rd16(const std::vector<std::uint8_t>& b, std::size_t at) {
    if (at + 2 > b.size()) fail(ErrorCode::kIo, "truncated zip archive");
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t rd32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return static_cast<std::uint32_t>(rd16(b, at)) | (static_cast<std::uint32_t>(rd16(b, at + 2)) << 16);
}

std::vector<std::uint8_t> deflate_raw(const std::vector<std::uint8_t>& in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        fail(ErrorCode::kIo, "deflateInit2 failed");
    }
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) fail(ErrorCode::kIo, "deflate failed");
    out.resize(zs.total_out);
    return out;
}

std::vector<std::uint8_t> inflate_raw(const std::uint8_t* in, std::size_t n, std::size_t expected) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) fail(ErrorCode::kIo, "inflateInit2 failed");
    std::vector<std::uint8_t> out(expected);
    zs.next_in = const_cast<Bytef*>(in);
    zs.avail_in = static_cast<uInt>(n);
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected) fail(ErrorCode::kIo, "corrupt deflate stream in archive");
    return out;
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& data) {
    return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), data.data(), static_cast<uInt>(data.size())));
}

}  // namespace

void write_archive(const std::filesystem::path& out, const std::vector<Entry>& unsorted) {
    // Member order is part of the bytes; sort so callers cannot perturb it.
    std::vector<const Entry*> entries;
    for (const auto& e : unsorted) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](const Entry* a, const Entry* b) { return a->path < b->path; });
    ByteWriter body;
    ByteWriter central;
    for (const auto* ep : entries) {
        const auto& e = *ep;
        if (e.data.size() > 0xFFFFFFFFull || body.buffer().size() > 0xFFFFFFFFull) {
            fail(ErrorCode::kResource, "archive member '" + e.path + "' exceeds the 4 GiB zip limit");
        }
        const auto crc = crc_of(e.data);
        auto packed = deflate_raw(e.data);
        std::uint16_t method = kMethodDeflate;
        const std::vector<std::uint8_t>* payload = &packed;
        if (packed.size() >= e.data.size()) {
            method = kMethodStore;
            payload = &e.data;
        }
        const auto offset = static_cast<std::uint32_t>(body.buffer().size());
        const auto name_len = static_cast<std::uint16_t>(e.path.size());

        body.u32(kLocalHeaderSig);
        body.u16(kVersion);
        body.u16(kUtf8Flag);
        body.u16(method);
        body.u16(kDosTime);
        body.u16(kDosDate);
        body.u32(crc);
        body.u32(static_cast<std::uint32_t>(payload->size()));
        body.u32(static_cast<std::uint32_t>(e.data.size()));
        body.u16(name_len);
        body.u16(0);
        body.bytes(e.path.data(), e.path.size());
        body.bytes(payload->data(), payload->size());

        central.u32(kCentralHeaderSig);
        central.u16((3 << 8) | kVersion);  // made by: unix
        central.u16(kVersion);
        central.u16(kUtf8Flag);
        central.u16(method);
        central.u16(kDosTime);
        central.u16(kDosDate);
        central.u32(crc);
        central.u32(static_cast<std::uint32_t>(payload->size()));
        central.u32(static_cast<std::uint32_t>(e.data.size()));
        central.u16(name_len);
        central.u16(0);  // extra
        central.u16(0);  // comment
        central.u16(0);  // disk
        central.u16(0);  // internal attrs
        central.u32((0100000u | (e.mode & 0777u)) << 16);
        central.u32(offset);
        central.bytes(e.path.data(), e.path.size());
    }
    if (entries.size() > 0xFFFF) fail(ErrorCode::kResource, "too many archive members");
    const auto central_offset = static_cast<std::uint32_t>(body.buffer().size());
    const auto central_size = static_cast<std::uint32_t>(central.buffer().size());
    ByteWriter tail;
    tail.u32(kEndOfCentralSig);
    tail.u16(0);
    tail.u16(0);
    tail.u16(static_cast<std::uint16_t>(entries.size()));
    tail.u16(static_cast<std::uint16_t>(entries.size()));
    tail.u32(central_size);
    tail.u32(central_offset);
    tail.u16(0);

    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::kIo, "cannot write archive '" + out.string() + "'");
    auto put = [&](const std::vector<std::uint8_t>& b) {
        os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    };
    put(body.buffer());
    put(central.buffer());
    put(tail.buffer());
    if (!os.flush()) fail(ErrorCode::kIo, "short write to '" + out.string() + "'");
}

std::vector<Entry> read_archive(const std::filesystem::path& archive) {
    std::ifstream in(archive, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read archive '" + archive.string() + "'");
    const std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (b.size() < 22) fail(ErrorCode::kIo, "not a zip archive: '" + archive.string() + "'");

    std::size_t eocd = std::string::npos;
    for (std::size_t i = b.size() - 22 + 1; i-- > 0;) {
        if (rd32(b, i) == kEndOfCentralSig) {
            eocd = i;
            break;
        }
    }
    if (eocd == std::string::npos) fail(ErrorCode::kIo, "zip end-of-central-directory not found");
    const std::size_t count = rd16(b, eocd + 10);
    std::size_t at = rd32(b, eocd + 16);

    std::vector<Entry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (rd32(b, at) != kCentralHeaderSig) fail(ErrorCode::kIo, "corrupt zip central directory");
        const auto method = rd16(b, at + 10);
        const auto crc = rd32(b, at + 16);
        const auto csize = rd32(b, at + 20);
        const auto usize = rd32(b, at + 24);
        const auto nlen = rd16(b, at + 28);
        const auto xlen = rd16(b, at + 30);
        const auto clen = rd16(b, at + 32);
        const auto attrs = rd32(b, at + 38);
        const auto local = rd32(b, at + 42);
        if (at + 46 + nlen > b.size()) fail(ErrorCode::kIo, "truncated zip central directory");
        Entry e;
        e.path.assign(reinterpret_cast<const char*>(&b[at + 46]), nlen);
        e.mode = (attrs >> 16) & 0777u;
        if (e.mode == 0) e.mode = 0644;

        if (rd32(b, local) != kLocalHeaderSig) fail(ErrorCode::kIo, "corrupt zip local header");
        const std::size_t data_at = local + 30 + rd16(b, local + 26) + rd16(b, local + 28);
        if (data_at + csize > b.size()) fail(ErrorCode::kIo, "truncated zip member '" + e.path + "'");
        if (method == kMethodStore) {
            e.data.assign(b.begin() + static_cast<std::ptrdiff_t>(data_at),
                          b.begin() + static_cast<std::ptrdiff_t>(data_at + csize));
        } else if (method == kMethodDeflate) {
            e.data = inflate_raw(&b[data_at], csize, usize);
        } else {
            fail(ErrorCode::kUnsupported, "zip compression method " + std::to_string(method) + " not supported");
        }
        if (crc_of(e.data) != crc) fail(ErrorCode::kIo, "CRC mismatch for '" + e.path + "'");
        out.push_back(std::move(e));
        at += 46 + nlen + xlen + clen;
    }
    return out;
}

void extract_archive(const std::filesystem::path& archive, const std::filesystem::path& dest) {
    namespace fs = std::filesystem;
    for (const auto& e : read_archive(archive)) {
        const fs::path rel = fs::path(e.path).lexically_normal();
        if (rel.is_absolute() || rel.empty() || *rel.begin() == "..") {
            fail(ErrorCode::kIo, "archive member '" + e.path + "' escapes the extraction root");
        }
        const auto target = dest / rel;
        fs::create_directories(target.parent_path());
        std::ofstream os(target, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorCode::kIo, "cannot write '" + target.string() + "'");
        os.write(reinterpret_cast<const char*>(e.data.data()), static_cast<std::streamsize>(e.data.size()));
        os.close();
        fs::permissions(target, static_cast<fs::perms>(e.mode), fs::perm_options::replace);
    }
}

}  // namespace slsbench::zip
