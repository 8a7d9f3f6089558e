// Copyright 2026 The SensorHub Authors
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

/// On-disk layout of a persistent store.
///
///   <dir>/store.snap   "STAS1\n" + one framed record: full state as JSON
///   <dir>/store.wal    "STAS1\n" + framed records: one JSON batch per write
///
/// A framed record is `u32 length | u32 crc32 | payload`, little endian.
/// Replay stops at the first short or corrupt record; anything after it is
/// a torn write and is cut off on open.

#pragma once

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <array>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

#include "sensorhub/error.hpp"

namespace sensorhub {

inline constexpr std::string_view kStoreMagic = "STAS1\n";

class Journal {
 public:
  static constexpr const char* kSnapshotName = "store.snap";
  static constexpr const char* kWalName = "store.wal";

  explicit Journal(std::filesystem::path dir, bool sync = false) : dir_(std::move(dir)), sync_(sync) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IoError, "cannot create data directory " + dir_.string() + ": " + ec.message());
  }

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  ~Journal() {
    if (fd_ >= 0) ::close(fd_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  /// Feeds the snapshot payload (if any) and then every intact WAL record
  /// to the callbacks, and leaves the WAL open for appending.
  void recover(const std::function<void(std::string_view)>& on_snapshot,
               const std::function<void(std::string_view)>& on_batch) {
    const auto snap = dir_ / kSnapshotName;
    if (std::filesystem::exists(snap)) {
      const std::string data = read_file(snap);
      std::size_t pos = check_magic(data, snap);
      std::string_view payload;
      if (!next_record(data, pos, payload))
        throw Error(Errc::CorruptStore, "snapshot record is damaged: " + snap.string());
      on_snapshot(payload);
    }

    const auto wal = dir_ / kWalName;
    std::size_t good_end = kStoreMagic.size();
    if (std::filesystem::exists(wal)) {
      const std::string data = read_file(wal);
      std::size_t pos = check_magic(data, wal);
      std::string_view payload;
      while (next_record(data, pos, payload)) on_batch(payload);
      good_end = pos;
      if (good_end < data.size()) std::filesystem::resize_file(wal, good_end);
    } else {
      write_file_atomically(wal, std::string(kStoreMagic));
    }
    open_wal();
    wal_bytes_ = good_end;
  }

  void append(std::string_view payload) {
    if (fd_ < 0) open_wal();
    const std::string rec = frame(payload);
    write_all(fd_, rec);
    if (sync_ && ::fdatasync(fd_) != 0) throw Error(Errc::IoError, "fdatasync failed: " + errno_text());
    wal_bytes_ += rec.size();
  }

  std::size_t wal_bytes() const { return wal_bytes_; }

  /// Replaces the snapshot with `state` and empties the WAL.
  void checkpoint(std::string_view state) {
    write_file_atomically(dir_ / kSnapshotName, std::string(kStoreMagic) + frame(state));
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
    write_file_atomically(dir_ / kWalName, std::string(kStoreMagic));
    open_wal();
    wal_bytes_ = kStoreMagic.size();
  }

  static std::string frame(std::string_view payload) {
    std::string out;
    out.reserve(payload.size() + 8);
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    put_u32(out, crc(payload));
    out.append(payload);
    return out;
  }

 private:
  static std::uint32_t crc(std::string_view s) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
  }

  static void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }

  static std::uint32_t get_u32(std::string_view s, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
    return v;
  }

  static bool next_record(std::string_view data, std::size_t& pos, std::string_view& payload) {
    if (pos + 8 > data.size()) return false;
    const auto len = get_u32(data, pos);
    const auto sum = get_u32(data, pos + 4);
    if (pos + 8 + len > data.size()) return false;
    const auto body = data.substr(pos + 8, len);
    if (crc(body) != sum) return false;
    payload = body;
    pos += 8 + len;
    return true;
  }

  static std::size_t check_magic(std::string_view data, const std::filesystem::path& p) {
    if (data.substr(0, kStoreMagic.size()) != kStoreMagic)
      throw Error(Errc::CorruptStore, "missing STAS1 header: " + p.string());
    return kStoreMagic.size();
  }

  static std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static std::string errno_text() { return std::strerror(errno); }

  static void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
      const auto n = ::write(fd, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::IoError, "write failed: " + errno_text());
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  void write_file_atomically(const std::filesystem::path& p, const std::string& data) const {
    const auto tmp = p.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(Errc::IoError, "cannot open " + tmp + ": " + errno_text());
    try {
      write_all(fd, data);
      if (sync_) ::fsync(fd);
    } catch (...) {
      ::close(fd);
      throw;
    }
    ::close(fd);
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec) throw Error(Errc::IoError, "cannot rename " + tmp + ": " + ec.message());
  }

  void open_wal() {
    const auto wal = (dir_ / kWalName).string();
    fd_ = ::open(wal.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    if (fd_ < 0) throw Error(Errc::IoError, "cannot open " + wal + ": " + errno_text());
  }

  std::filesystem::path dir_;
  bool sync_;
  int fd_ = -1;
  std::size_t wal_bytes_ = 0;
};

}  // namespace sensorhub
