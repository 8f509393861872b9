// Exact relative-expansion certification by exhaustive subset enumeration,
// plus the two strategies that raise expansion to 1: seeded edge insertion and
// thickening. Values are exact rationals; a missing value means no subset has
// a positive denominator, which certifies any threshold.
#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/rational.hpp>

#include "qdeform/graph.hpp"

namespace qdeform {

using Beta = boost::rational<long long>;

struct ExpansionQuery {
    std::vector<Index> subset;  // the port set U
    std::size_t t = 1;
    Beta threshold{1};
};

struct ExpansionOptions {
    std::size_t cap = 24;       // brute force refuses graphs bigger than this
    unsigned n_threads = 1;
};

// value absent <=> every subset has denominator zero (beta unbounded).
struct ExpansionCertificate {
    std::optional<Beta> value;
    std::vector<Index> witness;

    bool bounded() const { return value.has_value(); }
};

struct CertifyResult {
    bool ok = true;
    std::optional<Beta> violation_value;
    std::vector<Index> violation_witness;
};

class CapExceeded : public std::runtime_error {
public:
    CapExceeded(std::size_t n, std::size_t cap)
        : std::runtime_error("graph with " + std::to_string(n) +
                             " vertices exceeds the brute-force cap of " +
                             std::to_string(cap) + " vertices"),
          n_(n),
          cap_(cap) {}
    std::size_t n_vertices() const { return n_; }
    std::size_t cap() const { return cap_; }

private:
    std::size_t n_;
    std::size_t cap_;
};

namespace detail {

// Sorted-vertex-list lexicographic order on subset bitmasks: at the lowest
// differing vertex p, the side lacking p wins only if it is a strict prefix
// (no vertex above p).
inline bool subset_lex_less(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ b;
    if (x == 0) return false;
    int p = std::countr_zero(x);
    bool a_has = (a >> p) & 1;
    std::uint64_t without = a_has ? b : a;
    bool without_is_prefix = (p >= 63) || (without >> (p + 1)) == 0;
    return a_has ? !without_is_prefix : without_is_prefix;
}

struct SubsetScan {
    std::size_t n = 0;
    std::uint64_t u_mask = 0;
    long long u_size = 0;
    long long t = 1;
    std::vector<std::vector<std::pair<int, long long>>> nbr;  // (vertex, multiplicity)
    std::vector<long long> degree;

    SubsetScan(const Graph& g, const ExpansionQuery& q) {
        n = g.n_vertices();
        t = static_cast<long long>(q.t);
        for (Index v : q.subset) {
            if (v >= n) throw std::invalid_argument("port vertex out of range");
            u_mask |= 1ull << v;
        }
        u_size = std::popcount(u_mask);
        nbr.resize(n);
        degree.assign(n, 0);
        std::vector<std::vector<long long>> count(n, std::vector<long long>(n, 0));
        for (auto [u, v] : g.edges()) {
            ++count[u][v];
            ++count[v][u];
            ++degree[u];
            ++degree[v];
        }
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t w = 0; w < n; ++w) {
                if (count[v][w]) nbr[v].emplace_back(static_cast<int>(w), count[v][w]);
            }
        }
    }

    long long cut_of(std::uint64_t mask) const {
        long long cut = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (!((mask >> v) & 1)) continue;
            for (auto [w, c] : nbr[v]) {
                if (!((mask >> w) & 1)) cut += c;
            }
        }
        return cut;
    }

    long long denom_of(std::uint64_t mask) const {
        long long inside = std::popcount(mask & u_mask);
        return std::min({t, inside, u_size - inside});
    }

    // Visits masks in Gray-code order over index range [begin, end); flips one
    // vertex per step, adjusting the cut incrementally. Returns false if the
    // visitor aborted the scan.
    template <typename Visitor>
    bool run(std::uint64_t begin, std::uint64_t end, Visitor&& visit) const {
        if (begin >= end) return true;
        auto gray = [](std::uint64_t i) { return i ^ (i >> 1); };
        std::uint64_t mask = gray(begin);
        long long cut = cut_of(mask);
        for (std::uint64_t i = begin;; ++i) {
            if (!visit(mask, cut)) return false;
            if (i + 1 >= end) break;
            int bit = std::countr_zero(i + 1);
            std::uint64_t flipped = 1ull << bit;
            long long into = 0;
            for (auto [w, c] : nbr[bit]) {
                if ((mask >> w) & 1) into += c;
            }
            // Leaving vertices lose their cut edges into the set; joining ones
            // gain degree minus twice the internal edges.
            if (mask & flipped) {
                cut -= degree[bit] - 2 * into;
            } else {
                cut += degree[bit] - 2 * into;
            }
            mask ^= flipped;
        }
        return true;
    }
};

inline std::vector<Index> mask_to_vertices(std::uint64_t mask) {
    std::vector<Index> out;
    for (int v = 0; v < 64; ++v) {
        if ((mask >> v) & 1) out.push_back(static_cast<Index>(v));
    }
    return out;
}

// Fixed-size blocks merged in ascending order make the result independent of
// the thread count.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> scan_blocks(std::size_t n) {
    std::uint64_t total = 1ull << n;
    std::uint64_t n_blocks = std::min<std::uint64_t>(total, 64);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> blocks;
    std::uint64_t per = total / n_blocks;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        blocks.emplace_back(b * per, (b + 1 == n_blocks) ? total : (b + 1) * per);
    }
    return blocks;
}

inline void check_inputs(const Graph& g, const ExpansionQuery& q,
                         const ExpansionOptions& opts) {
    if (q.subset.empty()) throw std::invalid_argument("port set must not be empty");
    if (q.t == 0) throw std::invalid_argument("t must be positive");
    if (g.n_vertices() > opts.cap) throw CapExceeded(g.n_vertices(), opts.cap);
}

}  // namespace detail

inline ExpansionCertificate relative_expansion(const Graph& g, const ExpansionQuery& q,
                                               const ExpansionOptions& opts = {}) {
    detail::check_inputs(g, q, opts);
    detail::SubsetScan scan(g, q);
    auto blocks = detail::scan_blocks(scan.n);

    struct BlockBest {
        bool any = false;
        long long cut = 0;
        long long denom = 1;
        std::uint64_t witness = 0;
    };
    std::vector<BlockBest> best(blocks.size());
    auto run_block = [&](std::size_t b) {
        BlockBest local;
        scan.run(blocks[b].first, blocks[b].second, [&](std::uint64_t mask, long long cut) {
            long long denom = scan.denom_of(mask);
            if (denom > 0) {
                bool better = !local.any;
                if (!better) {
                    // cut/denom vs local.cut/local.denom, exact.
                    long long lhs = cut * local.denom;
                    long long rhs = local.cut * denom;
                    better = lhs < rhs ||
                             (lhs == rhs && detail::subset_lex_less(mask, local.witness));
                }
                if (better) local = {true, cut, denom, mask};
            }
            return true;
        });
        best[b] = local;
    };

    unsigned n_threads = std::max(1u, opts.n_threads);
    if (n_threads == 1) {
        for (std::size_t b = 0; b < blocks.size(); ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < blocks.size();
                     b = next.fetch_add(1)) {
                    run_block(b);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    ExpansionCertificate cert;
    BlockBest overall;
    for (const auto& local : best) {
        if (!local.any) continue;
        bool better = !overall.any;
        if (!better) {
            long long lhs = local.cut * overall.denom;
            long long rhs = overall.cut * local.denom;
            better = lhs < rhs ||
                     (lhs == rhs && detail::subset_lex_less(local.witness, overall.witness));
        }
        if (better) overall = local;
    }
    if (overall.any) {
        cert.value = Beta(overall.cut, overall.denom);
        cert.witness = detail::mask_to_vertices(overall.witness);
    }
    return cert;
}

// True iff beta_t(g, U) >= q.threshold; the counterexample, when one exists,
// is the first violating subset in scan order.
inline CertifyResult certify_at_least(const Graph& g, const ExpansionQuery& q,
                                      const ExpansionOptions& opts = {}) {
    detail::check_inputs(g, q, opts);
    detail::SubsetScan scan(g, q);
    auto blocks = detail::scan_blocks(scan.n);
    long long thr_num = q.threshold.numerator();
    long long thr_den = q.threshold.denominator();

    struct BlockHit {
        bool found = false;
        long long cut = 0;
        long long denom = 1;
        std::uint64_t witness = 0;
    };
    std::vector<BlockHit> hits(blocks.size());
    std::atomic<std::size_t> lowest_hit{blocks.size()};
    auto run_block = [&](std::size_t b) {
        BlockHit local;
        scan.run(blocks[b].first, blocks[b].second, [&](std::uint64_t mask, long long cut) {
            if (lowest_hit.load(std::memory_order_relaxed) < b) return false;
            long long denom = scan.denom_of(mask);
            if (denom > 0 && cut * thr_den < thr_num * denom) {
                local = {true, cut, denom, mask};
                return false;
            }
            return true;
        });
        if (local.found) {
            hits[b] = local;
            std::size_t cur = lowest_hit.load();
            while (b < cur && !lowest_hit.compare_exchange_weak(cur, b)) {
            }
        }
    };

    unsigned n_threads = std::max(1u, opts.n_threads);
    if (n_threads == 1) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            run_block(b);
            if (hits[b].found) break;
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < blocks.size();
                     b = next.fetch_add(1)) {
                    if (lowest_hit.load() < b) continue;
                    run_block(b);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    CertifyResult res;
    for (const auto& hit : hits) {
        if (hit.found) {
            res.ok = false;
            res.violation_value = Beta(hit.cut, hit.denom);
            res.violation_witness = detail::mask_to_vertices(hit.witness);
            break;
        }
    }
    return res;
}

class BoostInfeasible : public std::runtime_error {
public:
    explicit BoostInfeasible(std::optional<Beta> best)
        : std::runtime_error(
              "cannot reach expansion 1 under the degree cap; best achieved " +
              (best ? std::to_string(best->numerator()) + "/" +
                          std::to_string(best->denominator())
                    : std::string("unbounded"))),
          best_(best) {}
    const std::optional<Beta>& best_beta() const { return best_; }

private:
    std::optional<Beta> best_;
};

// Repeatedly connects a seeded-random vertex inside the worst cut to one
// outside it until beta_t(g, U) >= 1, never pushing any vertex past the
// degree cap.
inline Graph boost_by_edges(const Graph& g, const std::vector<Index>& subset,
                            std::size_t t, std::size_t degree_cap, std::uint64_t seed,
                            const ExpansionOptions& opts = {}) {
    Graph work = g;
    std::mt19937_64 rng(seed);
    ExpansionQuery q{subset, t, Beta(1)};
    std::optional<Beta> best;
    std::size_t max_rounds = 4 * work.n_vertices() * std::max<std::size_t>(degree_cap, 1);
    for (std::size_t round = 0; round <= max_rounds; ++round) {
        auto cert = relative_expansion(work, q, opts);
        if (!cert.bounded()) return work;
        if (!best || *cert.value > *best) best = cert.value;
        if (*cert.value >= Beta(1)) return work;

        std::vector<long long> degree(work.n_vertices(), 0);
        for (auto [u, v] : work.edges()) {
            ++degree[u];
            ++degree[v];
        }
        std::vector<bool> in_witness(work.n_vertices(), false);
        for (Index v : cert.witness) in_witness[v] = true;
        std::vector<Index> inside, outside;
        for (std::size_t v = 0; v < work.n_vertices(); ++v) {
            if (degree[v] >= static_cast<long long>(degree_cap)) continue;
            (in_witness[v] ? inside : outside).push_back(static_cast<Index>(v));
        }
        if (inside.empty() || outside.empty()) throw BoostInfeasible(best);
        std::uniform_int_distribution<std::size_t> pick_in(0, inside.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_out(0, outside.size() - 1);
        work.add_edge(inside[pick_in(rng)], outside[pick_out(rng)]);
    }
    throw BoostInfeasible(best);
}

struct ThickenBoostResult {
    ThickenedGraph thickened;
    std::vector<std::vector<Index>> layer_ports;  // port copies U x {l}, per layer
    std::optional<Beta> base_beta;
    bool verified = false;      // layer-0 port certified at threshold 1
    bool cap_skipped = false;   // thickened graph too big to certify
};

// L = ceil(1 / beta) layers lift the relative expansion to at least 1 for the
// port copy in every layer; certification runs on layer 0 when the thickened
// graph fits under the cap.
inline ThickenBoostResult boost_by_thickening(const Graph& g,
                                              const std::vector<Index>& subset,
                                              std::size_t t,
                                              const ExpansionOptions& opts = {}) {
    auto cert = relative_expansion(g, ExpansionQuery{subset, t, Beta(1)}, opts);
    std::size_t layers = 1;
    if (cert.bounded()) {
        if (*cert.value <= Beta(0)) {
            throw std::invalid_argument("zero expansion cannot be boosted by thickening");
        }
        if (*cert.value < Beta(1)) {
            long long num = cert.value->numerator();
            long long den = cert.value->denominator();
            layers = static_cast<std::size_t>((den + num - 1) / num);
        }
    }
    ThickenBoostResult res;
    res.base_beta = cert.value;
    res.thickened = thicken(g, layers);
    for (std::size_t l = 0; l < layers; ++l) {
        std::vector<Index> port;
        for (Index v : subset) port.push_back(res.thickened.vertex_at(l, v));
        res.layer_ports.push_back(std::move(port));
    }
    if (res.thickened.graph.n_vertices() > opts.cap) {
        res.cap_skipped = true;
        return res;
    }
    auto check = certify_at_least(res.thickened.graph,
                                  ExpansionQuery{res.layer_ports[0], t, Beta(1)}, opts);
    res.verified = check.ok;
    return res;
}

}  // namespace qdeform
