#include "fincfg/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <sstream>
#include <utility>

namespace fincfg {

namespace {

std::uint32_t low_mask(int bits) {
    return bits >= 32 ? 0xFFFFFFFFu : ((1u << bits) - 1);
}

bool contains(const std::vector<std::uint32_t>& sorted, std::uint32_t x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return it != sorted.end() && *it == x;
}

big_int big_pow(int base, int e) {
    big_int r = 1;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

big_int ceil_div(const big_int& a, const big_int& b) {
    return (a + b - 1) / b;
}

std::uint64_t sm64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

std::string part_text(const OrderedPartition& p) {
    std::ostringstream os;
    os << "[" << p.i << "," << p.j << "] side " << p.side << " at n=" << p.n;
    return os.str();
}

void validate_rectangle(const SetRectangle& r, const char* what) {
    const OrderedPartition& p = r.part;
    if (p.n < 1 || p.n > 16 || p.i < 1 || p.i > p.j || p.j > 2 * p.n || (p.side != 0 && p.side != 1))
        throw Error(errc::bad_argument, std::string(what) + ": malformed partition");
    std::uint32_t masks[2] = {p.part_mask(0), p.part_mask(1)};
    const std::vector<std::uint32_t>* lists[2] = {&r.S, &r.T};
    for (int side = 0; side < 2; ++side) {
        std::uint32_t prev = 0;
        bool first = true;
        for (std::uint32_t u : *lists[side]) {
            if (u & ~masks[side])
                throw Error(errc::bad_argument,
                            std::string(what) + ": member not a subset of its part");
            if (!first && u <= prev)
                throw Error(errc::bad_argument,
                            std::string(what) + ": member list not strictly ascending");
            prev = u;
            first = false;
        }
    }
}

// [lo, hi] 1-based when mask is one nonempty contiguous run of bits.
std::optional<std::pair<int, int>> contiguous_run(std::uint32_t mask) {
    if (mask == 0) return std::nullopt;
    int lo = std::countr_zero(mask);
    int width = std::popcount(mask);
    if (mask != (low_mask(width) << lo)) return std::nullopt;
    return std::make_pair(lo + 1, lo + width);
}

// Exact full-image check: the rectangles must cover every word of the target
// language, nothing outside it, and pairwise share no word.
void verify_set_cover(const std::vector<SetRectangle>& cover, int n, const char* what) {
    std::vector<std::uint32_t> p0(cover.size()), p1(cover.size());
    for (std::size_t i = 0; i < cover.size(); ++i) {
        p0[i] = cover[i].part.part_mask(0);
        p1[i] = cover[i].part.part_mask(1);
    }
    std::uint64_t total = 1ull << (2 * n);
    for (std::uint64_t xw = 0; xw < total; ++xw) {
        std::uint32_t x = static_cast<std::uint32_t>(xw);
        bool in_l = has_matching_pair(x, n);
        int hits = 0;
        std::size_t first = 0, second = 0;
        for (std::size_t i = 0; i < cover.size(); ++i) {
            if (contains(cover[i].S, x & p0[i]) && contains(cover[i].T, x & p1[i])) {
                (hits == 0 ? first : second) = i;
                if (++hits >= 2) break;
            }
        }
        std::string w = sets_to_word(SetWord{x, n});
        if (in_l && hits == 0)
            throw Error(errc::not_a_cover, std::string(what) + ": word " + w + " is not covered");
        if (!in_l && hits > 0) {
            std::ostringstream os;
            os << what << ": rectangle " << first << " covers " << w << " outside the language";
            throw Error(errc::not_a_cover, os.str());
        }
        if (hits > 1) {
            std::ostringstream os;
            os << what << ": word " << w << " lies in rectangles " << first << " and " << second;
            throw Error(errc::not_disjoint, os.str());
        }
    }
}

// Re-expresses a rectangle over a new partition of the same universe. Only
// positions inside group_mask may change side. Members are bucketed by their
// trace on group_mask; within a bucket pair the bits crossing sides are
// constant, so each bucket pair forms a rectangle again. Piece denotations
// are disjoint (distinct traces) and union to the input denotation.
std::vector<SetRectangle> reseat_rectangle(const SetRectangle& r, const OrderedPartition& gamma,
                                           std::uint32_t group_mask) {
    std::uint32_t a0 = r.part.part_mask(0), a1 = r.part.part_mask(1);
    std::uint32_t g0 = gamma.part_mask(0), g1 = gamma.part_mask(1);
    std::uint32_t m01 = a0 & g1, m10 = a1 & g0;
    if ((m01 | m10) & ~group_mask)
        throw Error(errc::bad_argument, "reseat: side change outside the declared boundary");
    std::map<std::uint32_t, std::vector<std::uint32_t>> us, vs;
    for (std::uint32_t u : r.S) us[u & group_mask].push_back(u);
    for (std::uint32_t v : r.T) vs[v & group_mask].push_back(v);
    std::vector<SetRectangle> pieces;
    for (const auto& [ku, ulist] : us) {
        for (const auto& [kv, vlist] : vs) {
            SetRectangle piece;
            piece.part = gamma;
            piece.S.reserve(ulist.size());
            piece.T.reserve(vlist.size());
            for (std::uint32_t u : ulist) piece.S.push_back((u & ~m01) | (kv & m10));
            for (std::uint32_t v : vlist) piece.T.push_back((v & ~m10) | (ku & m01));
            std::sort(piece.S.begin(), piece.S.end());
            std::sort(piece.T.begin(), piece.T.end());
            pieces.push_back(std::move(piece));
        }
    }
    return pieces;
}

// Coin-per-candidate when the list is small, otherwise a fixed number of
// index draws; never empty, so sampled rectangles always denote something.
std::vector<std::uint32_t> pick_members(const std::vector<std::uint32_t>& candidates,
                                        std::size_t max_side, SampleRng& rng) {
    std::vector<std::uint32_t> out;
    if (candidates.size() <= max_side) {
        for (std::uint32_t c : candidates)
            if (rng.coin()) out.push_back(c);
    } else {
        for (std::size_t k = 0; k < max_side; ++k)
            out.push_back(candidates[rng.bounded(candidates.size())]);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    if (out.empty()) out.push_back(candidates[rng.bounded(candidates.size())]);
    return out;
}

}  // namespace

IntervalFamily interval_family(int ambient_n) {
    if (ambient_n < 1) throw Error(errc::bad_argument, "interval_family: positive n required");
    if (ambient_n > 16)
        throw Error(errc::cap_exceeded, "interval_family: universe exceeds 32 positions");
    IntervalFamily f;
    f.ambient_n = ambient_n;
    f.n = ambient_n - ambient_n % 4;
    f.m = f.n / 4;
    for (int b = 0; b < f.m; ++b) f.intervals.push_back(0xFu << (4 * b));
    for (int b = 0; b < f.m; ++b) f.intervals.push_back(0xFu << (ambient_n + 4 * b));
    for (int p = f.n; p < ambient_n; ++p)
        f.spare_mask |= (1u << p) | (1u << (ambient_n + p));
    return f;
}

bool has_matching_pair(std::uint32_t bits, int n) {
    return (bits & (bits >> n) & low_mask(n)) != 0;
}

ABLabels build_ab(int n, int cap_n) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "build_ab: n must be a positive multiple of 4");
    if (cap_n > 16) cap_n = 16;
    if (n > cap_n) {
        std::ostringstream os;
        os << "build_ab: n=" << n << " exceeds cap " << cap_n;
        throw Error(errc::cap_exceeded, os.str());
    }
    ABLabels lab;
    lab.family = interval_family(n);
    int k = 2 * lab.family.m;
    std::vector<std::array<int, 4>> slots(k);
    for (int t = 0; t < k; ++t) {
        std::uint32_t mask = lab.family.intervals[t];
        int s = 0;
        for (int b = 0; b < 32; ++b)
            if (mask >> b & 1) slots[t][s++] = b;
    }
    std::uint64_t total = 1ull << (2 * k);
    lab.members.reserve(total);
    for (std::uint64_t c = 0; c < total; ++c) {
        std::uint32_t mask = 0;
        std::uint64_t d = c;
        for (int t = 0; t < k; ++t) {
            mask |= 1u << slots[t][d & 3];
            d >>= 2;
        }
        lab.members.push_back(mask);
    }
    std::sort(lab.members.begin(), lab.members.end());
    lab.odd.resize(lab.members.size());
    for (std::size_t i = 0; i < lab.members.size(); ++i) {
        bool o = (std::popcount(lab.members[i] & (lab.members[i] >> n) & low_mask(n)) & 1) != 0;
        lab.odd[i] = o;
        (o ? lab.a_count : lab.b_count)++;
    }
    return lab;
}

DiscCounts rectangle_counts(const SetRectangle& r, const ABLabels& ab) {
    if (r.part.n != ab.family.ambient_n)
        throw Error(errc::bad_argument, "rectangle_counts: universe size mismatch");
    validate_rectangle(r, "rectangle_counts");
    std::uint32_t p0 = r.part.part_mask(0), p1 = r.part.part_mask(1);
    DiscCounts c;
    for (std::size_t i = 0; i < ab.members.size(); ++i) {
        std::uint32_t x = ab.members[i];
        if (contains(r.S, x & p0) && contains(r.T, x & p1)) (ab.odd[i] ? c.in_a : c.in_b)++;
    }
    return c;
}

long long discrepancy(const SetRectangle& r, const ABLabels& ab) {
    return rectangle_counts(r, ab).disc();
}

big_int aligned_cap(int m) {
    if (m < 0) throw Error(errc::bad_argument, "aligned_cap: m must be nonnegative");
    return big_int(1) << (3 * m);
}

big_int balanced_cap(int m) {
    if (m < 1) throw Error(errc::bad_argument, "balanced_cap: m must be positive");
    big_int target = big_int(1) << (10 * m);
    big_int lo = 1, hi = big_int(1) << (4 * m);
    while (lo < hi) {
        big_int mid = (lo + hi + 1) / 2;
        if (mid * mid * mid <= target)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

CountingReport verify_counting_lemma(int n) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "verify_counting_lemma: n must be a multiple of 4");
    CountingReport rep;
    rep.n = n;
    for (int mm = 1; 4 * mm <= n; ++mm) {
        ABLabels lab = build_ab(4 * mm, 16);
        CountingRow row;
        row.m = mm;
        row.family_size = big_int(static_cast<std::uint64_t>(lab.members.size()));
        row.a_count = big_int(static_cast<std::uint64_t>(lab.a_count));
        row.b_count = big_int(static_cast<std::uint64_t>(lab.b_count));
        std::uint64_t outside = 0;
        bool a_inside = true;
        for (std::size_t i = 0; i < lab.members.size(); ++i) {
            bool match = has_matching_pair(lab.members[i], 4 * mm);
            if (lab.odd[i])
                a_inside = a_inside && match;
            else if (!match)
                ++outside;
        }
        row.b_outside = big_int(outside);
        row.a_inside = a_inside;
        row.gap = row.a_count - (row.b_count - row.b_outside);
        big_int p16 = big_pow(16, mm), p8 = big_pow(8, mm), p12 = big_pow(12, mm);
        row.identities_ok = row.family_size == (big_int(1) << (4 * mm)) &&
                            row.a_count == (p16 - p8) / 2 && row.b_count == (p16 + p8) / 2 &&
                            row.b_outside == p12 && a_inside && row.gap == p12 - p8;
        rep.rows.push_back(std::move(row));
    }
    for (int mm = 1; mm <= 8; ++mm) {
        CountingScanRow s;
        s.m = mm;
        s.gap = big_pow(12, mm) - big_pow(8, mm);
        s.holds = s.gap > 0 && s.gap * s.gap > (big_int(1) << (7 * mm));
        if (s.holds && rep.first_holds == 0) rep.first_holds = mm;
        rep.scan.push_back(std::move(s));
    }
    rep.ok = rep.first_holds > 0;
    for (const CountingRow& row : rep.rows) rep.ok = rep.ok && row.identities_ok;
    for (const CountingScanRow& s : rep.scan)
        rep.ok = rep.ok && s.holds == (s.m >= rep.first_holds);
    return rep;
}

std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    std::uint64_t h = 0x243f6a8885a308d3ull;
    h = sm64(h ^ a);
    h = sm64(h ^ b);
    h = sm64(h ^ c);
    h = sm64(h ^ d);
    return h;
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t stream)
    : eng_(sm64(sm64(seed) ^ sm64(stream))) {}

bool SampleRng::coin() { return (eng_() & 1ull) != 0; }

std::uint64_t SampleRng::bounded(std::uint64_t k) {
    if (k == 0) throw Error(errc::bad_argument, "bounded: empty range");
    if (k == 1) return 0;
    std::uint64_t mask = k - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
        std::uint64_t v = eng_() & mask;
        if (v < k) return v;
    }
}

std::vector<std::uint32_t> submasks(std::uint32_t mask) {
    if (std::popcount(mask) > 20)
        throw Error(errc::cap_exceeded, "submasks: more than 2^20 subsets");
    std::vector<std::uint32_t> out;
    out.reserve(1ull << std::popcount(mask));
    std::uint32_t s = 0;
    while (true) {
        out.push_back(s);
        if (s == mask) break;
        s = (s - mask) & mask;
    }
    return out;
}

std::vector<std::uint32_t> member_projections(const ABLabels& ab, std::uint32_t mask) {
    std::vector<std::uint32_t> out;
    out.reserve(ab.members.size());
    for (std::uint32_t x : ab.members) out.push_back(x & mask);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SetRectangle sample_rectangle(const OrderedPartition& part, const ABLabels& ab,
                              bool projections_only, SampleRng& rng) {
    if (part.n != ab.family.ambient_n)
        throw Error(errc::bad_argument, "sample_rectangle: universe size mismatch");
    SetRectangle r;
    r.part = part;
    for (int side = 0; side < 2; ++side) {
        std::uint32_t mask = part.part_mask(side);
        std::vector<std::uint32_t> cand =
            projections_only ? member_projections(ab, mask) : submasks(mask);
        std::vector<std::uint32_t>& dst = side == 0 ? r.S : r.T;
        for (std::uint32_t c : cand)
            if (rng.coin()) dst.push_back(c);
    }
    return r;
}

std::vector<OrderedPartition> balanced_intervals(int n) {
    std::vector<OrderedPartition> out;
    for (int i = 1; i <= 2 * n; ++i)
        for (int j = i; j <= 2 * n; ++j)
            for (int side = 0; side < 2; ++side) {
                OrderedPartition p{n, i, j, side};
                if (p.balanced()) out.push_back(p);
            }
    return out;
}

std::vector<OrderedPartition> neat_balanced_intervals(int n) {
    IntervalFamily f = interval_family(n);
    std::vector<OrderedPartition> out;
    for (const OrderedPartition& p : balanced_intervals(n))
        if (is_neat(p, f)) out.push_back(p);
    return out;
}

RestrictedReport check_restricted_bound(int n, int samples, std::uint64_t seed) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "check_restricted_bound: n must be a multiple of 4");
    if (samples < 1) throw Error(errc::bad_argument, "check_restricted_bound: samples must be positive");
    ABLabels lab = build_ab(n);
    RestrictedReport rep;
    rep.n = n;
    rep.m = n / 4;
    rep.samples_per_interval = samples;
    rep.seed = seed;
    long long cap = 1ll << (3 * rep.m);
    rep.aligned_ok = true;
    for (int i = 1; i <= n + 1; ++i) {
        OrderedPartition part{n, i, i + n - 1, 1};
        RestrictedRow row;
        row.i = i;
        row.aligned = (i - 1) % 4 == 0;
        row.samples = samples;
        row.cap = cap;
        std::uint32_t p0 = part.part_mask(0), p1 = part.part_mask(1);
        std::vector<std::uint32_t> cand[2][2] = {
            {submasks(p0), submasks(p1)},
            {member_projections(lab, p0), member_projections(lab, p1)},
        };
        for (int s = 0; s < samples; ++s) {
            int flavor = s & 1;
            SampleRng rng(seed, mix_stream(0xA15Dull, static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(s)));
            std::vector<std::uint32_t> S, T;
            for (std::uint32_t c : cand[flavor][0])
                if (rng.coin()) S.push_back(c);
            for (std::uint32_t c : cand[flavor][1])
                if (rng.coin()) T.push_back(c);
            long long a = 0, b = 0;
            for (std::size_t idx = 0; idx < lab.members.size(); ++idx) {
                std::uint32_t x = lab.members[idx];
                if (contains(S, x & p0) && contains(T, x & p1)) (lab.odd[idx] ? a : b)++;
            }
            long long d = a >= b ? a - b : b - a;
            row.max_disc = std::max(row.max_disc, d);
            if (d > cap) ++row.violations;
        }
        if (row.aligned) {
            rep.aligned_samples += static_cast<std::size_t>(samples);
            rep.aligned_max = std::max(rep.aligned_max, row.max_disc);
            if (row.violations > 0) rep.aligned_ok = false;
        } else {
            rep.unaligned_max = std::max(rep.unaligned_max, row.max_disc);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

long long max_interval_discrepancy(int n, int i) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "max_interval_discrepancy: n must be a multiple of 4");
    if (i < 1 || i + n - 1 > 2 * n)
        throw Error(errc::bad_argument, "max_interval_discrepancy: interval out of range");
    ABLabels lab = build_ab(n);
    OrderedPartition part{n, i, i + n - 1, 1};
    std::uint32_t p0 = part.part_mask(0), p1 = part.part_mask(1);
    std::vector<std::uint32_t> proj0 = member_projections(lab, p0);
    std::vector<std::uint32_t> proj1 = member_projections(lab, p1);
    if (proj0.size() > 12 || proj1.size() > 12)
        throw Error(errc::cap_exceeded, "max_interval_discrepancy: too many distinct projections");
    std::size_t w0 = proj0.size(), w1 = proj1.size();
    std::vector<long long> mat(w0 * w1, 0);
    for (std::size_t idx = 0; idx < lab.members.size(); ++idx) {
        std::uint32_t x = lab.members[idx];
        std::size_t i0 = static_cast<std::size_t>(
            std::lower_bound(proj0.begin(), proj0.end(), x & p0) - proj0.begin());
        std::size_t i1 = static_cast<std::size_t>(
            std::lower_bound(proj1.begin(), proj1.end(), x & p1) - proj1.begin());
        mat[i0 * w1 + i1] += lab.odd[idx] ? 1 : -1;
    }
    // For a fixed S the best T keeps exactly the columns of one sign, so only
    // the 2^|proj0| row selections need scanning.
    long long best = 0;
    std::vector<long long> col(w1);
    for (std::uint32_t sel = 0; sel < (1u << w0); ++sel) {
        std::fill(col.begin(), col.end(), 0ll);
        for (std::size_t t = 0; t < w0; ++t)
            if (sel >> t & 1)
                for (std::size_t j = 0; j < w1; ++j) col[j] += mat[t * w1 + j];
        long long pos = 0, neg = 0;
        for (long long v : col) (v > 0 ? pos : neg) += v;
        best = std::max({best, pos, -neg});
    }
    return best;
}

GoodIndexSet good_indices(const OrderedPartition& p) {
    IntervalFamily f = interval_family(p.n);
    GoodIndexSet g;
    g.part = p;
    std::uint32_t p0 = p.part_mask(0), p1 = p.part_mask(1);
    for (int k = 1; k <= p.n; ++k) {
        bool x0 = (p0 >> (k - 1) & 1) != 0;
        bool y0 = (p0 >> (p.n + k - 1) & 1) != 0;
        if (x0 != y0) {
            g.good_mask |= 1u << (k - 1);
            g.v_mask |= (1u << (k - 1)) | (1u << (p.n + k - 1));
        }
    }
    for (std::size_t t = 0; t < f.intervals.size(); ++t)
        if ((f.intervals[t] & g.v_mask) == f.intervals[t])
            g.full_good_intervals.push_back(static_cast<int>(t) + 1);
    g.part1_good = p1 & g.v_mask;
    g.part1_bad = p1 & ~g.v_mask;
    g.good_count = std::popcount(g.good_mask);
    g.lemma_checked =
        is_neat(p, f) && p.balanced() && std::popcount(p0) <= std::popcount(p1);
    g.lemma_ok = (p0 & ~g.v_mask) == 0 && std::popcount(p0) == g.good_count;
    return g;
}

bool is_neat(const OrderedPartition& p, const IntervalFamily& f) {
    if (p.n != f.ambient_n) throw Error(errc::bad_argument, "is_neat: universe size mismatch");
    std::uint32_t p0 = p.part_mask(0);
    for (std::uint32_t iv : f.intervals) {
        std::uint32_t x = iv & p0;
        if (x != 0 && x != iv) return false;
    }
    return true;
}

NeatSplit make_neat(const SetRectangle& r, const IntervalFamily& f) {
    if (r.part.n != f.ambient_n)
        throw Error(errc::bad_argument, "make_neat: universe size mismatch");
    validate_rectangle(r, "make_neat");
    if (!r.part.balanced())
        throw Error(errc::bad_argument, "make_neat: partition must be balanced");
    NeatSplit out;
    if (is_neat(r.part, f)) {
        out.gamma = r.part;
        out.pieces = {r};
        return out;
    }
    std::uint32_t iv = r.part.interval_mask();
    std::vector<std::pair<int, int>> cut;  // straddling blocks as [lo, hi] 1-based
    for (std::uint32_t block : f.intervals) {
        std::uint32_t x = block & iv;
        if (x != 0 && x != block) {
            auto run = contiguous_run(block);
            cut.push_back(*run);
            out.cut_mask |= block;
        }
    }
    // An interval boundary crosses at most one block per end.
    if (cut.empty() || cut.size() > 2)
        throw Error(errc::bad_argument, "make_neat: unexpected straddle pattern");
    // grow = the interval absorbs the block, shrink = the block leaves it.
    // First candidate moves every straddling block into the smaller part.
    bool interval_small =
        r.part.part_size(r.part.side) <= r.part.part_size(1 - r.part.side);
    int preferred = interval_small ? 0 : 1;  // 0 = grow, 1 = shrink
    std::vector<std::pair<int, int>> combos = {
        {preferred, preferred}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};
    bool found = false;
    for (std::size_t c = 0; c < combos.size() && !found; ++c) {
        if (c > 0 && combos[c] == combos[0]) continue;
        int ni = r.part.i, nj = r.part.j;
        int dirs[2] = {combos[c].first, combos[c].second};
        for (std::size_t b = 0; b < cut.size(); ++b) {
            auto [lo, hi] = cut[b];
            if (dirs[b] == 0) {
                ni = std::min(ni, lo);
                nj = std::max(nj, hi);
            } else {
                if (lo < r.part.i) ni = std::max(ni, hi + 1);
                if (hi > r.part.j) nj = std::min(nj, lo - 1);
            }
        }
        if (ni > nj || ni < 1 || nj > 2 * r.part.n) continue;
        OrderedPartition gamma{r.part.n, ni, nj, r.part.side};
        if (!is_neat(gamma, f) || !gamma.balanced()) continue;
        out.gamma = gamma;
        found = true;
    }
    if (!found) {
        std::ostringstream os;
        os << "make_neat: no balanced neat partition reachable from " << part_text(r.part);
        throw Error(errc::unbalanceable_at_this_n, os.str());
    }
    out.pieces = reseat_rectangle(r, out.gamma, out.cut_mask);
    return out;
}

NeatSplitAudit audit_make_neat(int n, int samples, std::uint64_t seed) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "audit_make_neat: n must be a multiple of 4");
    if (samples < 1) throw Error(errc::bad_argument, "audit_make_neat: samples must be positive");
    IntervalFamily f = interval_family(n);
    ABLabels lab = build_ab(n);
    std::vector<OrderedPartition> parts;
    for (const OrderedPartition& p : balanced_intervals(n))
        if (!is_neat(p, f)) parts.push_back(p);
    NeatSplitAudit rep;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    rep.all_ok = true;
    if (parts.empty()) {
        rep.all_ok = false;
        rep.failure = "no balanced non-neat interval partitions at this n";
        return rep;
    }
    for (int s = 0; s < samples; ++s) {
        const OrderedPartition& part = parts[static_cast<std::size_t>(s) % parts.size()];
        SampleRng rng(seed, mix_stream(0xB3A7ull, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(s), 0));
        SetRectangle r;
        r.part = part;
        for (int side = 0; side < 2; ++side) {
            std::uint32_t mask = part.part_mask(side);
            std::vector<std::uint32_t> cand =
                (s & 1) ? member_projections(lab, mask) : submasks(mask);
            (side == 0 ? r.S : r.T) = pick_members(cand, 64, rng);
        }
        auto fail = [&](const std::string& why) {
            rep.all_ok = false;
            rep.failure = why + " (sample " + std::to_string(s) + " on " + part_text(part) + ")";
        };
        NeatSplit split;
        try {
            split = make_neat(r, f);
        } catch (const Error& e) {
            fail(std::string("make_neat failed: ") + e.what());
            return rep;
        }
        if (split.pieces.size() > 256) {
            fail("more than 256 pieces");
            return rep;
        }
        rep.max_pieces = std::max(rep.max_pieces, static_cast<int>(split.pieces.size()));
        std::vector<std::uint32_t> all;
        for (const SetRectangle& piece : split.pieces) {
            if (!(piece.part == split.gamma) || !is_neat(piece.part, f) ||
                !piece.part.balanced()) {
                fail("piece not on the common neat balanced partition");
                return rep;
            }
            std::vector<std::uint32_t> den = piece.denotation();
            all.insert(all.end(), den.begin(), den.end());
        }
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
            fail("pieces overlap");
            return rep;
        }
        if (all != r.denotation()) {
            fail("piece union differs from the input denotation");
            return rep;
        }
    }
    return rep;
}

GeneralBoundCheck check_general_rectangle(const SetRectangle& r, const ABLabels& ab,
                                          std::map<int, ABLabels>* label_cache) {
    const IntervalFamily& f = ab.family;
    int n = f.ambient_n;
    if (f.n != n)
        throw Error(errc::not_divisible_by_4, "check_general_rectangle: n must be a multiple of 4");
    if (r.part.n != n)
        throw Error(errc::bad_argument, "check_general_rectangle: universe size mismatch");
    validate_rectangle(r, "check_general_rectangle");
    if (!r.part.balanced())
        throw Error(errc::bad_argument, "check_general_rectangle: partition must be balanced");
    if (!is_neat(r.part, f))
        throw Error(errc::bad_argument, "check_general_rectangle: partition must be neat");

    GeneralBoundCheck out;
    out.cap = balanced_cap(f.m);
    std::uint32_t p0 = r.part.part_mask(0), p1 = r.part.part_mask(1);
    const std::vector<std::uint32_t>* sm = &r.S;
    const std::vector<std::uint32_t>* tm = &r.T;
    if (std::popcount(p0) > std::popcount(p1)) {
        std::swap(p0, p1);
        std::swap(sm, tm);
    }

    std::uint32_t good = 0, vmask = 0;
    for (int k = 1; k <= n; ++k) {
        bool x0 = (p0 >> (k - 1) & 1) != 0;
        bool y0 = (p0 >> (n + k - 1) & 1) != 0;
        if (x0 != y0) {
            good |= 1u << (k - 1);
            vmask |= (1u << (k - 1)) | (1u << (n + k - 1));
        }
    }
    int G = std::popcount(good);
    out.good_count = G;
    bool structure = (p0 & ~vmask) == 0 && std::popcount(p0) == G && G > 0 && G % 4 == 0;
    if (structure) {
        out.formula_cap = (big_int(1) << (n - G)) * (big_int(1) << (3 * G / 4));
        out.reduced_cap = big_int(1) << (3 * G / 4);
    }

    std::uint32_t bad = p1 & ~vmask;
    std::map<std::uint32_t, std::pair<long long, long long>> klass;
    long long signed_total = 0;
    for (std::size_t idx = 0; idx < ab.members.size(); ++idx) {
        std::uint32_t x = ab.members[idx];
        if (!contains(*sm, x & p0) || !contains(*tm, x & p1)) continue;
        auto& kc = klass[x & bad];
        (ab.odd[idx] ? kc.first : kc.second)++;
    }
    for (const auto& [alpha, kc] : klass) signed_total += kc.first - kc.second;
    out.disc = signed_total >= 0 ? signed_total : -signed_total;
    if (!structure) {
        out.ok = false;
        return out;
    }

    std::array<int, 32> cmap;
    cmap.fill(-1);
    int pos = 0;
    for (int b = 0; b < 2 * n; ++b)
        if (vmask >> b & 1) cmap[static_cast<std::size_t>(b)] = pos++;
    structure = structure && pos == 2 * G;
    for (int k = 1; k <= n; ++k)
        if (good >> (k - 1) & 1)
            structure = structure && cmap[static_cast<std::size_t>(n + k - 1)] ==
                                         cmap[static_cast<std::size_t>(k - 1)] + G;
    auto compact = [&](std::uint32_t mask) {
        std::uint32_t o = 0;
        for (int b = 0; b < 2 * n; ++b)
            if (mask >> b & 1) o |= 1u << cmap[static_cast<std::size_t>(b)];
        return o;
    };
    std::uint32_t rp0 = compact(p0), rp1 = compact(p1 & vmask);

    // The surviving positions form an aligned interval partition again.
    OrderedPartition gamma;
    bool gfound = false;
    if (auto run = contiguous_run(rp0)) {
        gamma = OrderedPartition{G, run->first, run->second, 0};
        gfound = true;
    } else if (auto run2 = contiguous_run(rp1)) {
        gamma = OrderedPartition{G, run2->first, run2->second, 1};
        gfound = true;
    }
    structure = structure && gfound;
    if (gfound) {
        IntervalFamily rf = interval_family(G);
        structure = structure && is_neat(gamma, rf) && gamma.balanced() &&
                    gamma.part_mask(0) == rp0 && gamma.part_mask(1) == rp1;
    }
    if (!structure) {
        out.ok = false;
        return out;
    }

    ABLabels local;
    const ABLabels* rlab;
    if (label_cache) {
        auto it = label_cache->find(G);
        if (it == label_cache->end()) it = label_cache->emplace(G, build_ab(G, 16)).first;
        rlab = &it->second;
    } else {
        local = build_ab(G, 16);
        rlab = &local;
    }

    std::vector<std::uint32_t> rs;
    rs.reserve(sm->size());
    for (std::uint32_t u : *sm) rs.push_back(compact(u));
    std::sort(rs.begin(), rs.end());
    std::map<std::uint32_t, std::vector<std::uint32_t>> talpha;
    for (std::uint32_t v : *tm) talpha[v & bad].push_back(compact(v & vmask));

    bool renaming = true;
    long long asum = 0, rmax = 0;
    int realizable = 0;
    for (auto& [alpha, list] : talpha) {
        bool real = true;
        for (std::uint32_t block : f.intervals)
            if ((block & bad) == block) real = real && std::popcount(alpha & block) == 1;
        if (!real) {
            // No family member carries this trace, so the class is empty.
            auto it = klass.find(alpha);
            structure = structure && (it == klass.end() ||
                                      (it->second.first == 0 && it->second.second == 0));
            continue;
        }
        ++realizable;
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        long long a2 = 0, b2 = 0;
        for (std::size_t idx = 0; idx < rlab->members.size(); ++idx) {
            std::uint32_t x = rlab->members[idx];
            if (contains(rs, x & rp0) && contains(list, x & rp1)) (rlab->odd[idx] ? a2 : b2)++;
        }
        long long rd = a2 >= b2 ? a2 - b2 : b2 - a2;
        auto it = klass.find(alpha);
        long long aa = it == klass.end() ? 0 : it->second.first;
        long long bb = it == klass.end() ? 0 : it->second.second;
        long long ad = aa >= bb ? aa - bb : bb - aa;
        renaming = renaming && rd == ad;
        asum += rd;
        rmax = std::max(rmax, rd);
    }
    out.alpha_count = realizable;
    out.alpha_sum = asum;
    out.reduced_max = rmax;
    out.renaming_ok = renaming;
    structure = structure && big_int(realizable) <= (big_int(1) << (n - G));
    structure = structure && out.formula_cap <= out.cap;
    out.ok = structure && renaming && big_int(out.disc) <= out.cap &&
             big_int(out.disc) <= out.formula_cap && out.disc <= out.alpha_sum &&
             big_int(out.reduced_max) <= out.reduced_cap;
    return out;
}

GeneralReport check_general_bound(int n, int samples, std::uint64_t seed) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "check_general_bound: n must be a multiple of 4");
    if (samples < 1) throw Error(errc::bad_argument, "check_general_bound: samples must be positive");
    ABLabels lab = build_ab(n);
    std::vector<OrderedPartition> parts = neat_balanced_intervals(n);
    GeneralReport rep;
    rep.n = n;
    rep.m = n / 4;
    rep.samples = samples;
    rep.seed = seed;
    rep.cap = balanced_cap(rep.m);
    rep.all_ok = true;
    std::map<int, ABLabels> cache;
    std::map<std::pair<std::size_t, int>, std::array<std::vector<std::uint32_t>, 2>> cands;
    for (int s = 0; s < samples; ++s) {
        std::size_t pi = static_cast<std::size_t>(s) % parts.size();
        const OrderedPartition& part = parts[pi];
        int flavor = static_cast<int>((static_cast<std::size_t>(s) / parts.size()) % 2);
        auto key = std::make_pair(pi, flavor);
        auto it = cands.find(key);
        if (it == cands.end()) {
            std::array<std::vector<std::uint32_t>, 2> lists;
            for (int side = 0; side < 2; ++side) {
                std::uint32_t mask = part.part_mask(side);
                lists[static_cast<std::size_t>(side)] =
                    flavor ? member_projections(lab, mask) : submasks(mask);
            }
            it = cands.emplace(key, std::move(lists)).first;
        }
        SampleRng rng(seed, mix_stream(0x6EB0ull, static_cast<std::uint64_t>(n),
                                       static_cast<std::uint64_t>(s), 0));
        SetRectangle r;
        r.part = part;
        for (std::uint32_t c : it->second[0])
            if (rng.coin()) r.S.push_back(c);
        for (std::uint32_t c : it->second[1])
            if (rng.coin()) r.T.push_back(c);
        GeneralBoundCheck chk = check_general_rectangle(r, lab, &cache);
        rep.max_disc = std::max(rep.max_disc, chk.disc);
        if (!chk.ok) {
            ++rep.violations;
            rep.all_ok = false;
        }
    }
    return rep;
}

GoodIndexAudit audit_good_indices(int n) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "audit_good_indices: n must be a multiple of 4");
    IntervalFamily f = interval_family(n);
    ABLabels lab = build_ab(n);
    GoodIndexAudit rep;
    rep.n = n;
    rep.ok = true;
    std::map<int, ABLabels> cache;
    for (const OrderedPartition& p : balanced_intervals(n)) {
        std::uint32_t p0 = p.part_mask(0);
        if (std::popcount(p0) > std::popcount(p.part_mask(1))) continue;
        GoodIndexSet gi = good_indices(p);
        ++rep.all_checked;
        auto fail = [&](const std::string& why) {
            rep.ok = false;
            rep.failure = why + " at " + part_text(p);
        };
        if (!gi.lemma_ok) {
            fail("good-index conclusions failed");
            return rep;
        }
        if (!is_neat(p, f)) continue;
        ++rep.neat_checked;
        if (!gi.lemma_checked) {
            fail("hypothesis detection failed");
            return rep;
        }
        for (int b = 0; b < f.m; ++b) {
            bool i0 = (f.intervals[static_cast<std::size_t>(b)] & p0) ==
                      f.intervals[static_cast<std::size_t>(b)];
            bool j0 = (f.intervals[static_cast<std::size_t>(b + f.m)] & p0) ==
                      f.intervals[static_cast<std::size_t>(b + f.m)];
            if (i0 && j0) {
                fail("paired blocks both inside the small part");
                return rep;
            }
        }
        SetRectangle full;
        full.part = p;
        full.S = submasks(p0);
        full.T = submasks(p.part_mask(1));
        GeneralBoundCheck chk = check_general_rectangle(full, lab, &cache);
        if (!chk.ok) {
            fail("full-rectangle decomposition check failed");
            return rep;
        }
    }
    return rep;
}

CoverBoundReport cover_lower_bound(const std::vector<SetRectangle>& cover, int n) {
    if (n < 4 || n % 4 != 0)
        throw Error(errc::not_divisible_by_4, "cover_lower_bound: n must be a multiple of 4");
    if (n > 8)
        throw Error(errc::cap_exceeded, "cover_lower_bound: exact image verification capped at n=8");
    if (cover.empty()) throw Error(errc::not_a_cover, "cover_lower_bound: no rectangles");
    IntervalFamily f = interval_family(n);
    for (std::size_t i = 0; i < cover.size(); ++i) {
        if (cover[i].part.n != n)
            throw Error(errc::bad_argument, "cover_lower_bound: universe size mismatch");
        validate_rectangle(cover[i], "cover_lower_bound");
        if (!cover[i].part.balanced()) {
            std::ostringstream os;
            os << "cover_lower_bound: rectangle " << i << " is not balanced";
            throw Error(errc::bad_argument, os.str());
        }
    }
    verify_set_cover(cover, n, "cover_lower_bound");
    ABLabels lab = build_ab(n);
    CoverBoundReport rep;
    rep.n = n;
    rep.m = f.m;
    rep.ell = cover.size();
    rep.gap = big_pow(12, f.m) - big_pow(8, f.m);
    for (const SetRectangle& r : cover) {
        DiscCounts c = rectangle_counts(r, lab);
        rep.rows.push_back(CoverBoundRow{c.in_a, c.in_b});
        rep.telescoped += c.signed_gap();
        NeatSplit split = make_neat(r, f);
        rep.ell_neat += split.pieces.size();
        rep.max_inflation = std::max(rep.max_inflation, static_cast<int>(split.pieces.size()));
    }
    rep.telescoping_ok = big_int(rep.telescoped) == rep.gap;
    big_int cap = balanced_cap(f.m);
    rep.min_ell_neat = ceil_div(rep.gap, cap);
    rep.min_ell = ceil_div(rep.gap, 256 * cap);
    rep.bound_ok = big_int(static_cast<std::uint64_t>(rep.ell_neat)) >= rep.min_ell_neat &&
                   big_int(static_cast<std::uint64_t>(rep.ell)) >= rep.min_ell;
    rep.ok = rep.telescoping_ok && rep.bound_ok && rep.max_inflation <= 256;
    return rep;
}

FourRestriction restrict_to_multiple_of_four(const std::vector<SetRectangle>& cover, int n) {
    if (n < 5 || n % 4 == 0)
        throw Error(errc::bad_argument,
                    "restrict_to_multiple_of_four: needs n = 4t + a with t >= 1 and a in 1..3");
    if (n > 10)
        throw Error(errc::cap_exceeded,
                    "restrict_to_multiple_of_four: exact image verification capped at n=10");
    if (cover.empty()) throw Error(errc::not_a_cover, "restrict_to_multiple_of_four: no rectangles");
    for (std::size_t i = 0; i < cover.size(); ++i) {
        if (cover[i].part.n != n)
            throw Error(errc::bad_argument, "restrict_to_multiple_of_four: universe size mismatch");
        validate_rectangle(cover[i], "restrict_to_multiple_of_four");
        if (!cover[i].part.balanced()) {
            std::ostringstream os;
            os << "restrict_to_multiple_of_four: rectangle " << i << " is not balanced";
            throw Error(errc::bad_argument, os.str());
        }
    }
    verify_set_cover(cover, n, "restrict_to_multiple_of_four");
    int a = n % 4;
    int nn = n - a;
    std::uint32_t spare = interval_family(n).spare_mask;
    std::array<int, 32> cmap;
    cmap.fill(-1);
    int pos = 0;
    for (int b = 0; b < 2 * n; ++b)
        if (!(spare >> b & 1)) cmap[static_cast<std::size_t>(b)] = pos++;
    auto compact = [&](std::uint32_t mask) {
        std::uint32_t o = 0;
        for (int b = 0; b < 2 * n; ++b)
            if (mask >> b & 1) o |= 1u << cmap[static_cast<std::size_t>(b)];
        return o;
    };
    int lo = (2 * nn + 2) / 3, hi = 4 * nn / 3;  // balanced part-size window
    FourRestriction out;
    out.old_n = n;
    out.new_n = nn;
    for (std::size_t idx = 0; idx < cover.size(); ++idx) {
        const SetRectangle& r = cover[idx];
        SetRectangle rr;
        for (std::uint32_t u : r.S)
            if (!(u & spare)) rr.S.push_back(compact(u));
        for (std::uint32_t v : r.T)
            if (!(v & spare)) rr.T.push_back(compact(v));
        if (rr.S.empty() || rr.T.empty()) continue;  // no spare-free word survives
        std::sort(rr.S.begin(), rr.S.end());
        std::sort(rr.T.begin(), rr.T.end());
        std::uint32_t riv = compact(r.part.interval_mask() & ~spare);
        auto run = contiguous_run(riv);
        if (!run)
            throw Error(errc::bad_argument,
                        "restrict_to_multiple_of_four: interval did not stay contiguous");
        rr.part = OrderedPartition{nn, run->first, run->second, r.part.side};
        std::size_t pieces_before = out.pieces.size();
        if (rr.part.balanced()) {
            out.pieces.push_back(std::move(rr));
            out.source.push_back(idx);
        } else {
            // widen or shrink at the right end first, then the left
            int width = run->second - run->first + 1;
            int ni = run->first, nj = run->second;
            if (width < lo) {
                int need = lo - width;
                int right = std::min(need, 2 * nn - nj);
                nj += right;
                ni -= need - right;
            } else {
                nj -= width - hi;
            }
            OrderedPartition gamma{nn, ni, nj, rr.part.side};
            if (!gamma.balanced())
                throw Error(errc::unbalanceable_at_this_n,
                            "restrict_to_multiple_of_four: rebalancing failed");
            std::uint32_t moved = rr.part.interval_mask() ^ gamma.interval_mask();
            out.max_moved = std::max(out.max_moved, std::popcount(moved));
            for (SetRectangle& piece : reseat_rectangle(rr, gamma, moved)) {
                out.pieces.push_back(std::move(piece));
                out.source.push_back(idx);
            }
        }
        int inflation = static_cast<int>(out.pieces.size() - pieces_before);
        if (inflation > (1 << (2 * a)))
            throw Error(errc::unbalanceable_at_this_n,
                        "restrict_to_multiple_of_four: piece count exceeded the rebalancing cap");
        out.max_inflation = std::max(out.max_inflation, inflation);
    }
    verify_set_cover(out.pieces, nn, "restrict_to_multiple_of_four (reduced)");
    return out;
}

}  // namespace fincfg
