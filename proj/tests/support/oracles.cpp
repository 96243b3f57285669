// Copyright (c) 2026 The motsref authors
// SPDX-License-Identifier: Apache-2.0
#include "support/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace testsupport {
namespace {

namespace fs = std::filesystem;

long double cosine_ld(const mots::Embedding& x, const mots::Embedding& y) {
  long double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += static_cast<long double>(x[i]) * y[i];
    nx += static_cast<long double>(x[i]) * x[i];
    ny += static_cast<long double>(y[i]) * y[i];
  }
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

}  // namespace

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  std::ostringstream name;
  name << "motsref_" << tag << "_" << std::hex << rd() << "_" << counter++;
  const fs::path p = fs::temp_directory_path() / name.str();
  fs::create_directories(p);
  path_ = p.string();
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (fs::path(path_) / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double pixel_iou(const mots::BinaryMask& a, const mots::BinaryMask& b) {
  std::size_t inter = 0, uni = 0;
  for (int x = 0; x < a.width; ++x) {
    for (int y = 0; y < a.height; ++y) {
      const bool pa = a.at(x, y) != 0;
      const bool pb = b.at(x, y) != 0;
      inter += pa && pb;
      uni += pa || pb;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double pixel_iom(const mots::BinaryMask& a, const mots::BinaryMask& b) {
  std::size_t inter = 0, area_a = 0, area_b = 0;
  for (int x = 0; x < a.width; ++x) {
    for (int y = 0; y < a.height; ++y) {
      const bool pa = a.at(x, y) != 0;
      const bool pb = b.at(x, y) != 0;
      inter += pa && pb;
      area_a += pa;
      area_b += pb;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(std::min(area_a, area_b));
}

namespace {

void enumerate_matchings(const mots::CostMatrix& m, std::size_t row, std::vector<char>& used,
                         std::size_t card, double cost, BruteForceResult& best) {
  if (row == m.rows) {
    if (card > best.cardinality || (card == best.cardinality && cost < best.cost)) {
      best = {card, cost};
    }
    return;
  }
  enumerate_matchings(m, row + 1, used, card, cost, best);
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (used[c] || !mots::is_feasible(m.at(row, c))) continue;
    used[c] = 1;
    enumerate_matchings(m, row + 1, used, card + 1, cost + m.at(row, c), best);
    used[c] = 0;
  }
}

}  // namespace

BruteForceResult brute_force_matching(const mots::CostMatrix& matrix) {
  BruteForceResult best;
  best.cardinality = 0;
  best.cost = 0.0;
  std::vector<char> used(matrix.cols, 0);
  enumerate_matchings(matrix, 0, used, 0, 0.0, best);
  return best;
}

double tracklet_distance_oracle(const mots::Tracklet& a, const mots::Tracklet& b,
                                int theta_t, const mots::EmbeddingStore& store) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.id == b.id) return kInf;
  if (a.start_frame() <= b.end_frame() && b.start_frame() <= a.end_frame()) return kInf;
  const int gap = std::max({b.start_frame() - a.end_frame(),
                            a.start_frame() - b.end_frame(), 0});
  if (gap > theta_t) return kInf;

  long double sum = 0;
  for (const auto& oa : a.observations) {
    const auto& ea = store.at(oa.frame_id, oa.object_key);
    for (const auto& ob : b.observations) {
      sum += 1.0L - cosine_ld(ea, store.at(ob.frame_id, ob.object_key));
    }
  }
  return static_cast<double>(sum / (static_cast<long double>(a.length()) * b.length()));
}

std::optional<double> crossing_by_scan(double mn, double sn, double mp, double sp) {
  // Same sign pattern as the pdf difference, without the underflow.
  auto f = [&](double x) {
    const double zn = (x - mn) / sn;
    const double zp = (x - mp) / sp;
    return (-0.5 * zn * zn - std::log(sn)) - (-0.5 * zp * zp - std::log(sp));
  };
  const double step = 1e-4;
  double x0 = mn + step;
  double f0 = f(x0);
  for (double x1 = x0 + step; x1 < mp; x1 += step) {
    const double f1 = f(x1);
    if ((f0 > 0) != (f1 > 0)) {
      double lo = x0, hi = x1;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    x0 = x1;
    f0 = f1;
  }
  return std::nullopt;
}

namespace {

struct OracleCluster {
  std::vector<int> ids;                      // sorted member ids
  std::vector<std::size_t> indices;          // tracklet indices
  std::vector<std::pair<int, int>> ranges;   // one per member, unmerged
  std::vector<long double> sum;
  std::size_t count = 0;
};

bool ranges_feasible(const OracleCluster& a, const OracleCluster& b, int theta_t) {
  int min_gap = std::numeric_limits<int>::max();
  for (const auto& ra : a.ranges) {
    for (const auto& rb : b.ranges) {
      if (ra.first <= rb.second && rb.first <= ra.second) return false;  // overlap
      const int gap = std::max({rb.first - ra.second, ra.first - rb.second, 0});
      min_gap = std::min(min_gap, gap);
    }
  }
  return min_gap <= theta_t;
}

long double centroid_cos(const OracleCluster& a, const OracleCluster& b) {
  std::vector<float> ma(a.sum.size()), mb(b.sum.size());
  for (std::size_t i = 0; i < a.sum.size(); ++i) {
    ma[i] = static_cast<float>(a.sum[i] / static_cast<long double>(a.count));
    mb[i] = static_cast<float>(b.sum[i] / static_cast<long double>(b.count));
  }
  return cosine_ld(ma, mb);
}

}  // namespace

std::vector<std::vector<int>> greedy_merge_oracle(const std::vector<mots::Tracklet>& tracklets,
                                                  const mots::EmbeddingStore& store,
                                                  double cut, int theta_t,
                                                  bool normalize_centroids) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<OracleCluster> clusters;
  for (std::size_t i = 0; i < tracklets.size(); ++i) {
    const auto& t = tracklets[i];
    OracleCluster c;
    c.ids = {t.id};
    c.indices = {i};
    c.ranges = {{t.start_frame(), t.end_frame()}};
    c.sum.assign(static_cast<std::size_t>(store.dim()), 0.0L);
    for (const auto& o : t.observations) {
      const auto& e = store.at(o.frame_id, o.object_key);
      long double norm = 0;
      if (normalize_centroids) {
        for (const float v : e) norm += static_cast<long double>(v) * v;
        norm = std::sqrt(norm);
      }
      for (std::size_t d = 0; d < e.size(); ++d) {
        c.sum[d] += normalize_centroids ? e[d] / norm : static_cast<long double>(e[d]);
      }
    }
    c.count = t.observations.size();
    clusters.push_back(std::move(c));
  }

  auto pair_distance = [&](const OracleCluster& a, const OracleCluster& b) {
    if (a.indices.size() == 1 && b.indices.size() == 1) {
      return tracklet_distance_oracle(tracklets[a.indices[0]], tracklets[b.indices[0]], theta_t,
                                      store);
    }
    if (!ranges_feasible(a, b, theta_t)) return kInf;
    return static_cast<double>(1.0L - centroid_cos(a, b));
  };

  while (clusters.size() > 1) {
    double best_dist = kInf;
    int best_lo = -1, best_hi = -1;
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = pair_distance(clusters[i], clusters[j]);
        if (!(d < cut)) continue;
        const int lo = std::min(clusters[i].ids.front(), clusters[j].ids.front());
        const int hi = std::max(clusters[i].ids.front(), clusters[j].ids.front());
        if (d < best_dist ||
            (d == best_dist && std::pair(lo, hi) < std::pair(best_lo, best_hi))) {
          best_dist = d;
          best_lo = lo;
          best_hi = hi;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_lo < 0) break;
    auto& a = clusters[best_i];
    auto& b = clusters[best_j];
    a.ids.insert(a.ids.end(), b.ids.begin(), b.ids.end());
    std::sort(a.ids.begin(), a.ids.end());
    a.indices.insert(a.indices.end(), b.indices.begin(), b.indices.end());
    a.ranges.insert(a.ranges.end(), b.ranges.begin(), b.ranges.end());
    for (std::size_t d = 0; d < a.sum.size(); ++d) a.sum[d] += b.sum[d];
    a.count += b.count;
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
  }

  std::vector<std::vector<int>> out;
  out.reserve(clusters.size());
  for (auto& c : clusters) out.push_back(std::move(c.ids));
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
  const auto n = a.size();
  std::map<std::pair<int, int>, std::size_t> cells;
  std::map<int, std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    ++cells[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto comb2 = [](std::size_t k) {
    return static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
  };
  double sum_cells = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, c] : cells) sum_cells += comb2(c);
  for (const auto& [key, c] : rows) sum_rows += comb2(c);
  for (const auto& [key, c] : cols) sum_cols += comb2(c);
  const double total = comb2(n);
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return sum_cells == expected ? 1.0 : 0.0;
  return (sum_cells - expected) / (maximum - expected);
}

std::vector<std::string> manifest_issues_oracle(const std::vector<mots::TripletSample>& samples,
                                                const mots::ManifestContext& context) {
  std::vector<std::string> issues;
  auto complain = [&issues](std::size_t i, const std::string& what) {
    issues.push_back("index " + std::to_string(i) + ": " + what);
  };
  auto exists = [&context](const mots::ObsRef& o) {
    const auto it = context.frame_objects.find(o.frame_id);
    return it != context.frame_objects.end() && it->second.count(o.object_key) > 0;
  };
  auto identity = [&context](const mots::ObsRef& o) -> const int* {
    const auto it = context.identity_of.find({o.frame_id, o.object_key});
    return it == context.identity_of.end() ? nullptr : &it->second;
  };
  auto tracklet = [&context](const mots::ObsRef& o) -> const int* {
    const auto it = context.tracklet_of.find({o.frame_id, o.object_key});
    return it == context.tracklet_of.end() ? nullptr : &it->second;
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!exists(s.anchor)) complain(i, "anchor observation unknown");
    if (!exists(s.negative)) complain(i, "negative observation unknown");
    if (!s.positive_is_aug && !exists(s.positive)) complain(i, "positive observation unknown");

    switch (s.origin) {
      case mots::TripletOrigin::kTargetIntra:
        if (!s.positive_is_aug) complain(i, "positive must be an augmentation");
        if (s.anchor.frame_id != s.negative.frame_id) complain(i, "negative leaves anchor frame");
        if (s.anchor == s.negative) complain(i, "anchor equals negative");
        break;
      case mots::TripletOrigin::kTrainGt: {
        if (s.positive_is_aug) {
          complain(i, "labeled positive must be a real observation");
          break;
        }
        if (s.anchor == s.positive) complain(i, "anchor equals positive");
        const int* ia = identity(s.anchor);
        const int* ip = identity(s.positive);
        const int* in = identity(s.negative);
        if (!ia || !ip || !in) {
          complain(i, "labeled triplet references an unlabeled observation");
          break;
        }
        if (*ia != *ip) complain(i, "positive identity differs from anchor");
        if (*ia == *in) complain(i, "negative shares the anchor identity");
        break;
      }
      case mots::TripletOrigin::kTargetInter: {
        if (s.positive_is_aug) {
          complain(i, "cross-tracklet positive must be a real observation");
          break;
        }
        if (s.anchor.frame_id != s.negative.frame_id) complain(i, "negative leaves anchor frame");
        if (s.positive.frame_id == s.anchor.frame_id) complain(i, "positive shares anchor frame");
        const int* ta = tracklet(s.anchor);
        const int* tp = tracklet(s.positive);
        const int* tn = tracklet(s.negative);
        if (!ta || !tp || !tn) {
          complain(i, "triplet references an untracked observation");
          break;
        }
        if (*ta == *tn) complain(i, "negative shares the anchor tracklet");
        if (*ta != *tp) complain(i, "positive leaves the anchor tracklet");
        break;
      }
    }
  }
  return issues;
}

}  // namespace testsupport
