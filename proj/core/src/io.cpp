// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "mots/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include "mots/error.hpp"

namespace mots {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw ValidationError(path + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, const std::string& path, std::size_t line_no,
               const char* what) {
  T value{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    parse_fail(path, line_no, std::string("bad ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

// Calls fn(line_no, tokens) for every non-blank line.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line_no, split_tokens(line));
  }
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  append_u32(out, bits);
}

// Little-endian cursor over a loaded binary file.
class ByteReader {
 public:
  ByteReader(std::string path, std::vector<std::uint8_t> bytes)
      : path_(std::move(path)), bytes_(std::move(bytes)) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(u(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
  std::uint64_t u64() { return u(8); }
  float f32() {
    const auto bits = u32();
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::string magic4() {
    need(4);
    std::string m(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return m;
  }
  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw ValidationError(path_ + ": trailing bytes after record " +
                            std::to_string(pos_));
    }
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw ValidationError(path_ + ": truncated at byte " + std::to_string(pos_));
    }
  }
  std::uint64_t u(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)])
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::string path_;
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void atomic_write_raw(const std::string& path, const char* data, std::size_t size) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw Error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("rename failed: " + tmp + " -> " + path + " (" + ec.message() + ")");
}

std::uint32_t checked_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > static_cast<std::int64_t>(0xFFFFFFFFu)) {
    throw ValidationError(std::string(what) + " out of range for storage: " +
                          std::to_string(v));
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void atomic_write_text(const std::string& path, const std::string& content) {
  atomic_write_raw(path, content.data(), content.size());
}

void atomic_write_binary(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  atomic_write_raw(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::vector<MotsResultLine> read_mots(const std::string& path) {
  std::vector<MotsResultLine> lines;
  std::set<std::pair<int, int>> seen;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() != 6) parse_fail(path, line_no, "expected 6 fields");
    MotsResultLine l;
    l.frame_id = parse_number<int>(tok[0], path, line_no, "frame id");
    l.track_id = parse_number<int>(tok[1], path, line_no, "track id");
    l.class_id = parse_number<int>(tok[2], path, line_no, "class id");
    l.img_height = parse_number<int>(tok[3], path, line_no, "height");
    l.img_width = parse_number<int>(tok[4], path, line_no, "width");
    l.rle = tok[5];
    if (!seen.insert({l.frame_id, l.track_id}).second) {
      parse_fail(path, line_no, "duplicate (frame, track) pair " +
                                    std::to_string(l.frame_id) + "," +
                                    std::to_string(l.track_id));
    }
    lines.push_back(std::move(l));
  });
  return lines;
}

void write_mots(const std::string& path, std::vector<MotsResultLine> lines) {
  std::sort(lines.begin(), lines.end(), [](const MotsResultLine& a, const MotsResultLine& b) {
    if (a.frame_id != b.frame_id) return a.frame_id < b.frame_id;
    return a.track_id < b.track_id;
  });
  std::string out;
  for (const auto& l : lines) {
    out += std::to_string(l.frame_id) + " " + std::to_string(l.track_id) + " " +
           std::to_string(l.class_id) + " " + std::to_string(l.img_height) + " " +
           std::to_string(l.img_width) + " " + l.rle + "\n";
  }
  atomic_write_text(path, out);
}

std::vector<Detection> read_detections(const std::string& path, int source_id) {
  std::vector<Detection> dets;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() != 7) parse_fail(path, line_no, "expected 7 fields");
    Detection d;
    d.frame_id = parse_number<int>(tok[0], path, line_no, "frame id");
    d.object_key = parse_number<std::int64_t>(tok[1], path, line_no, "object key");
    d.class_id = parse_number<int>(tok[2], path, line_no, "class id");
    d.score = parse_number<double>(tok[3], path, line_no, "score");
    d.mask.height = parse_number<int>(tok[4], path, line_no, "height");
    d.mask.width = parse_number<int>(tok[5], path, line_no, "width");
    d.mask.counts = tok[6];
    d.source_id = source_id;
    if (d.score < 0.0 || d.score > 1.0) {
      parse_fail(path, line_no, "score outside [0,1]");
    }
    dets.push_back(std::move(d));
  });
  return dets;
}

void write_detections(const std::string& path, const std::vector<Detection>& detections) {
  std::string out;
  char score[32];
  for (const auto& d : detections) {
    std::snprintf(score, sizeof(score), "%.6f", d.score);
    out += std::to_string(d.frame_id) + " " + std::to_string(d.object_key) + " " +
           std::to_string(d.class_id) + " " + score + " " +
           std::to_string(d.mask.height) + " " + std::to_string(d.mask.width) + " " +
           d.mask.counts + "\n";
  }
  atomic_write_text(path, out);
}

void write_embeddings_binary(const std::string& path, const EmbeddingStore& store) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + store.size() * (8 + static_cast<std::size_t>(store.dim()) * 4));
  out.push_back('R');
  out.push_back('E');
  out.push_back('M');
  out.push_back('B');
  append_u16(out, 1);
  append_u32(out, static_cast<std::uint32_t>(store.dim()));
  append_u64(out, store.size());
  for (const auto& [key, emb] : store.entries()) {
    append_u32(out, checked_u32(key.first, "frame id"));
    append_u32(out, checked_u32(key.second, "object key"));
    for (const auto v : emb) append_f32(out, v);
  }
  atomic_write_binary(path, out);
}

EmbeddingStore read_embeddings_binary(const std::string& path) {
  ByteReader r(path, read_file_bytes(path));
  if (r.magic4() != "REMB") throw ValidationError(path + ": not an embedding file");
  const auto version = r.u16();
  if (version != 1) {
    throw ValidationError(path + ": unsupported version " + std::to_string(version));
  }
  const auto dim = r.u32();
  const auto count = r.u64();
  // A store that never saw an insert has no dimension; only reject a zero
  // dim when records claim to carry data.
  if (dim == 0 && count > 0) throw ValidationError(path + ": zero dimension");
  EmbeddingStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto frame = r.u32();
    const auto key = r.u32();
    Embedding emb(dim);
    for (auto& v : emb) v = r.f32();
    store.insert(static_cast<int>(frame), static_cast<std::int64_t>(key), std::move(emb));
  }
  r.expect_end();
  return store;
}

void write_embeddings_text(const std::string& path, const EmbeddingStore& store) {
  std::string out;
  char num[48];
  for (const auto& [key, emb] : store.entries()) {
    out += std::to_string(key.first) + " " + std::to_string(key.second);
    for (const auto v : emb) {
      std::snprintf(num, sizeof(num), " %.9g", static_cast<double>(v));
      out += num;
    }
    out += "\n";
  }
  atomic_write_text(path, out);
}

EmbeddingStore read_embeddings_text(const std::string& path) {
  EmbeddingStore store;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() < 3) parse_fail(path, line_no, "expected frame, key, and values");
    const int frame = parse_number<int>(tok[0], path, line_no, "frame id");
    const auto key = parse_number<std::int64_t>(tok[1], path, line_no, "object key");
    Embedding emb;
    emb.reserve(tok.size() - 2);
    for (std::size_t i = 2; i < tok.size(); ++i) {
      emb.push_back(parse_number<float>(tok[i], path, line_no, "embedding value"));
    }
    store.insert(frame, key, std::move(emb));
  });
  return store;
}

EmbeddingStore read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::string_view(magic, 4) == "REMB") return read_embeddings_binary(path);
  return read_embeddings_text(path);
}

void write_flow(const std::string& path, const FlowField& flow) {
  std::vector<std::uint8_t> out;
  const std::size_t n = static_cast<std::size_t>(flow.height) * flow.width;
  out.reserve(14 + n * 8);
  out.push_back('R');
  out.push_back('F');
  out.push_back('L');
  out.push_back('W');
  append_u16(out, 1);
  append_u32(out, static_cast<std::uint32_t>(flow.height));
  append_u32(out, static_cast<std::uint32_t>(flow.width));
  for (std::size_t i = 0; i < n; ++i) {
    append_f32(out, flow.dx[i]);
    append_f32(out, flow.dy[i]);
  }
  atomic_write_binary(path, out);
}

FlowField read_flow(const std::string& path) {
  ByteReader r(path, read_file_bytes(path));
  if (r.magic4() != "RFLW") throw ValidationError(path + ": not a flow file");
  const auto version = r.u16();
  if (version != 1) {
    throw ValidationError(path + ": unsupported version " + std::to_string(version));
  }
  const auto h = r.u32();
  const auto w = r.u32();
  FlowField flow(static_cast<int>(h), static_cast<int>(w));
  const std::size_t n = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < n; ++i) {
    flow.dx[i] = r.f32();
    flow.dy[i] = r.f32();
  }
  r.expect_end();
  return flow;
}

std::vector<GtLabel> read_gt_labels(const std::string& path) {
  std::vector<GtLabel> labels;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() != 4) parse_fail(path, line_no, "expected 4 fields");
    GtLabel l;
    l.frame_id = parse_number<int>(tok[0], path, line_no, "frame id");
    l.object_key = parse_number<std::int64_t>(tok[1], path, line_no, "object key");
    l.identity_id = parse_number<int>(tok[2], path, line_no, "identity id");
    const int fp = parse_number<int>(tok[3], path, line_no, "false-positive flag");
    if (fp != 0 && fp != 1) parse_fail(path, line_no, "false-positive flag must be 0 or 1");
    l.is_false_positive = fp == 1;
    labels.push_back(l);
  });
  return labels;
}

void write_gt_labels(const std::string& path, const std::vector<GtLabel>& labels) {
  std::string out;
  for (const auto& l : labels) {
    out += std::to_string(l.frame_id) + " " + std::to_string(l.object_key) + " " +
           std::to_string(l.identity_id) + " " + (l.is_false_positive ? "1" : "0") + "\n";
  }
  atomic_write_text(path, out);
}

std::vector<Tracklet> read_tracklets(const std::string& path) {
  std::vector<Tracklet> tracklets;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() < 3) parse_fail(path, line_no, "expected id, class, and observations");
    Tracklet t;
    t.id = parse_number<int>(tok[0], path, line_no, "tracklet id");
    t.class_id = parse_number<int>(tok[1], path, line_no, "class id");
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const auto colon = tok[i].find(':');
      if (colon == std::string::npos) {
        parse_fail(path, line_no, "expected frame:key but got '" + tok[i] + "'");
      }
      ObsRef o;
      o.frame_id = parse_number<int>(std::string_view(tok[i]).substr(0, colon), path,
                                     line_no, "frame id");
      o.object_key = parse_number<std::int64_t>(std::string_view(tok[i]).substr(colon + 1),
                                                path, line_no, "object key");
      if (!t.observations.empty() &&
          o.frame_id != t.observations.back().frame_id + 1) {
        parse_fail(path, line_no, "tracklet frames must be consecutive");
      }
      t.observations.push_back(o);
    }
    tracklets.push_back(std::move(t));
  });
  return tracklets;
}

void write_tracklets(const std::string& path, const std::vector<Tracklet>& tracklets) {
  std::string out;
  for (const auto& t : tracklets) {
    out += std::to_string(t.id) + " " + std::to_string(t.class_id);
    for (const auto& o : t.observations) {
      out += " " + std::to_string(o.frame_id) + ":" + std::to_string(o.object_key);
    }
    out += "\n";
  }
  atomic_write_text(path, out);
}

std::vector<Assignment> read_assignments(const std::string& path) {
  std::vector<Assignment> rows;
  for_each_line(path, [&](std::size_t line_no, const std::vector<std::string>& tok) {
    if (tok.size() != 3) parse_fail(path, line_no, "expected 3 fields");
    Assignment a;
    a.frame_id = parse_number<int>(tok[0], path, line_no, "frame id");
    a.object_key = parse_number<std::int64_t>(tok[1], path, line_no, "object key");
    a.track_id = parse_number<int>(tok[2], path, line_no, "track id");
    rows.push_back(a);
  });
  return rows;
}

void write_assignments(const std::string& path, const std::vector<Assignment>& assignments) {
  std::string out;
  for (const auto& a : assignments) {
    out += std::to_string(a.frame_id) + " " + std::to_string(a.object_key) + " " +
           std::to_string(a.track_id) + "\n";
  }
  atomic_write_text(path, out);
}

std::map<int, FlowField> read_flow_dir(const std::string& dir) {
  std::map<int, FlowField> flows;
  if (dir.empty()) return flows;
  if (!fs::is_directory(dir)) throw ValidationError("not a flow directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".rflw") continue;
    const std::string stem = entry.path().stem().string();
    const auto sep = stem.find('_');
    auto parse = [](std::string_view text, int& out) {
      const char* begin = text.data();
      const char* end = begin + text.size();
      auto [p, ec] = std::from_chars(begin, end, out);
      return ec == std::errc() && p == end;
    };
    int from = 0;
    int to = 0;
    const std::string_view view(stem);
    if (sep == std::string::npos || !parse(view.substr(0, sep), from) ||
        !parse(view.substr(sep + 1), to) || to != from + 1) {
      throw ValidationError("flow file name is not <t>_<t+1>.rflw: " +
                            entry.path().filename().string());
    }
    flows.emplace(from, read_flow(entry.path().string()));
  }
  return flows;
}

TrackOutputs materialize_tracks(const std::vector<FinalTrack>& tracks,
                                const std::vector<Detection>& fused) {
  std::map<std::pair<int, std::int64_t>, const Detection*> by_obs;
  for (const auto& d : fused) by_obs[{d.frame_id, d.object_key}] = &d;

  TrackOutputs out;
  for (const auto& track : tracks) {
    for (const auto& obs : track.observations) {
      const auto it = by_obs.find({obs.frame_id, obs.object_key});
      if (it == by_obs.end()) {
        throw Error("no fused mask for frame " + std::to_string(obs.frame_id) + " key " +
                    std::to_string(obs.object_key));
      }
      const Detection& d = *it->second;
      out.lines.push_back({obs.frame_id, track.track_id, track.class_id, d.mask.height,
                           d.mask.width, d.mask.counts});
      out.assignments.push_back({obs.frame_id, obs.object_key, track.track_id});
    }
  }
  std::sort(out.lines.begin(), out.lines.end(), [](const MotsResultLine& a, const MotsResultLine& b) {
    return std::tie(a.frame_id, a.track_id) < std::tie(b.frame_id, b.track_id);
  });
  std::sort(out.assignments.begin(), out.assignments.end(),
            [](const Assignment& a, const Assignment& b) {
              return std::tie(a.frame_id, a.object_key) < std::tie(b.frame_id, b.object_key);
            });
  return out;
}

}  // namespace mots
