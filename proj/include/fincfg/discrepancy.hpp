#pragma once

// Exact verification of the set-side counting machinery: the size-4 interval
// family over the index universe, the one-element-per-interval family with its
// parity labeling, discrepancy bounds for interval and neat balanced
// rectangles, neat splitting, good-index structure, the cover lower bound and
// the spare-element reduction to a multiple-of-4 universe.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fincfg/grammar.hpp"
#include "fincfg/rectangles.hpp"

namespace fincfg {

// The universe for half-length n is z_1..z_2n with x_k = z_k and y_k = z_{k+n}.
// Core intervals chop each half into runs of four: I_b covers x_{4b-3}..x_{4b}
// for b <= m and I_{b+m} the matching y-run. Pair index k couples position k
// with position k+n; interval I_b couples with I_{b+m}. When the ambient n is
// not a multiple of 4, the trailing pairs are spare and carry no interval.
struct IntervalFamily {
    int ambient_n = 0;                     // half-length of the ambient universe
    int n = 0;                             // largest multiple of 4 at most ambient_n
    int m = 0;                             // n / 4
    std::vector<std::uint32_t> intervals;  // I_1..I_2m as bit masks, ambient coordinates
    std::uint32_t spare_mask = 0;          // positions of the pairs beyond the core
};
IntervalFamily interval_family(int ambient_n);

// True iff some pair index k has both z_k and z_{k+n} selected; equals
// membership of sets_to_word(bits) in the target language.
bool has_matching_pair(std::uint32_t bits, int n);

// The family of all sets selecting exactly one element per interval, with the
// parity labeling: a member is odd ("A") when the number of matched pair
// indices is odd, even ("B") otherwise.
struct ABLabels {
    IntervalFamily family;
    std::vector<std::uint32_t> members;  // ascending
    std::vector<bool> odd;               // parallel to members
    std::size_t a_count = 0, b_count = 0;
};
ABLabels build_ab(int n, int cap_n = 12);  // n divisible by 4 and at most cap_n (hard limit 16)

// Exact |den(r) ∩ A| and |den(r) ∩ B| given that members of S live on part 0
// and members of T on part 1 of r's partition.
struct DiscCounts {
    long long in_a = 0, in_b = 0;
    long long disc() const { return in_a >= in_b ? in_a - in_b : in_b - in_a; }
    long long signed_gap() const { return in_a - in_b; }
};
DiscCounts rectangle_counts(const SetRectangle& r, const ABLabels& ab);
long long discrepancy(const SetRectangle& r, const ABLabels& ab);

big_int aligned_cap(int m);   // 2^{3m}: bound for block-aligned width-n interval rectangles
big_int balanced_cap(int m);  // largest d with d^3 <= 2^{10m}: bound for neat balanced rectangles

// Counting identities per core size, plus the growth inequality scan.
struct CountingRow {
    int m = 0;
    big_int family_size;  // 2^{4m}
    big_int a_count;      // (16^m - 8^m) / 2
    big_int b_count;      // (16^m + 8^m) / 2
    big_int b_outside;    // members of B with no matched pair: 12^m
    big_int gap;          // a_count - (b_count - b_outside) = 12^m - 8^m
    bool a_inside = false;   // every A member has a matched pair
    bool identities_ok = false;
};
struct CountingScanRow {
    int m = 0;
    big_int gap;          // 12^m - 8^m by formula
    bool holds = false;   // gap > 2^{7m/2}, decided via gap^2 > 2^{7m}
};
struct CountingReport {
    int n = 0;
    std::vector<CountingRow> rows;      // enumerated cores m' = 1..n/4
    std::vector<CountingScanRow> scan;  // formula-only, m = 1..8
    int first_holds = 0;                // smallest m where the inequality holds
    bool ok = false;
};
CountingReport verify_counting_lemma(int n);

// Seeded random rectangles on width-n interval partitions [i, i+n-1]. The
// discrepancy bound 2^{3m} is asserted only where the interval is aligned to
// the 4-blocks; unaligned intervals admit counterexamples (see
// max_interval_discrepancy), so their maxima are reported, not asserted.
// Sampling alternates two flavors: members drawn from all subsets of a part,
// and members drawn from projections of family members only.
struct RestrictedRow {
    int i = 0;
    bool aligned = false;
    int samples = 0;
    long long max_disc = 0;
    long long cap = 0;
    int violations = 0;  // samples with disc > cap
};
struct RestrictedReport {
    int n = 0, m = 0;
    int samples_per_interval = 0;
    std::uint64_t seed = 0;
    std::vector<RestrictedRow> rows;  // i = 1..n+1
    std::size_t aligned_samples = 0;
    long long aligned_max = 0, unaligned_max = 0;
    bool aligned_ok = false;  // zero violations over the aligned rows
};
RestrictedReport check_restricted_bound(int n, int samples, std::uint64_t seed);

// Exhaustive maximum discrepancy over ALL rectangles on the width-n interval
// partition [i, i+n-1], via the finitely many distinct member projections.
// Feasible only while each side has at most 12 distinct projections.
long long max_interval_discrepancy(int n, int i);

// Good pair indices of an ordered partition: k is good when exactly one of
// z_k, z_{k+n} lies in part 0. V_G collects the positions of good pairs; the
// larger side splits into its good part and the bad remainder. When the
// partition is neat, balanced and |part 0| <= |part 1|, the two structure
// conclusions (part 0 inside V_G, |part 0| = |G|) are checked and recorded.
struct GoodIndexSet {
    OrderedPartition part;
    std::uint32_t good_mask = 0;   // bit k-1 for good pair indices k
    std::uint32_t v_mask = 0;      // z_k and z_{k+n} for every good k
    std::vector<int> full_good_intervals;  // interval indices wholly inside V_G
    std::uint32_t part1_good = 0;  // part 1 ∩ V_G
    std::uint32_t part1_bad = 0;   // part 1 \ V_G
    int good_count = 0;            // |G|
    bool lemma_checked = false;    // hypotheses held, conclusions were evaluated
    bool lemma_ok = false;
};
GoodIndexSet good_indices(const OrderedPartition& p);

bool is_neat(const OrderedPartition& p, const IntervalFamily& f);

// Splits a balanced interval rectangle into disjoint rectangles on one common
// neat balanced partition. Candidate aligned partitions are tried in a fixed
// order starting with "move every straddling interval into the smaller part";
// the first balanced candidate wins. Pieces are grouped by the intersection of
// members with the straddling intervals, so at most 2^8 = 256 arise.
struct NeatSplit {
    OrderedPartition gamma;
    std::vector<SetRectangle> pieces;
    std::uint32_t cut_mask = 0;  // union of the straddling intervals
};
NeatSplit make_neat(const SetRectangle& r, const IntervalFamily& f);

// Audit of make_neat over seeded random balanced non-neat interval rectangles:
// piece count, common neat balanced partition, disjointness, union equality.
struct NeatSplitAudit {
    int n = 0, samples = 0;
    std::uint64_t seed = 0;
    int max_pieces = 0;
    bool all_ok = false;
    std::string failure;  // first violation, empty when all_ok
};
NeatSplitAudit audit_make_neat(int n, int samples, std::uint64_t seed);

// Per-rectangle verification of the neat balanced discrepancy bound via the
// projection decomposition: members of T are grouped by their trace on the bad
// part, each group is renamed onto the compacted good universe (an aligned
// width-|G| interval partition again), and the reduced discrepancies are
// computed against fresh labels of that size. Checks, per group, that the
// reduced discrepancy equals the ambient one, and that the total obeys both
// the counting cap 2^{n-|G|} * 2^{3|G|/4} and balanced_cap(m).
struct GeneralBoundCheck {
    long long disc = 0;
    big_int formula_cap;    // 2^{n-|G|} * 2^{3|G|/4}
    big_int cap;            // balanced_cap(m)
    int good_count = 0;     // |G| after role normalization
    int alpha_count = 0;    // realizable bad-part traces
    long long alpha_sum = 0;    // sum of reduced discrepancies
    long long reduced_max = 0;  // largest reduced discrepancy
    big_int reduced_cap;        // 2^{3|G|/4}
    bool renaming_ok = false;   // reduced == ambient discrepancy per group
    bool ok = false;
};
GeneralBoundCheck check_general_rectangle(const SetRectangle& r, const ABLabels& ab,
                                          std::map<int, ABLabels>* label_cache = nullptr);

struct GeneralReport {
    int n = 0, m = 0, samples = 0;
    std::uint64_t seed = 0;
    big_int cap;
    long long max_disc = 0;
    int violations = 0;
    bool all_ok = false;  // every sampled rectangle passed check_general_rectangle
};
GeneralReport check_general_bound(int n, int samples, std::uint64_t seed);

// Exhaustive structure audit over every neat balanced ordered interval with
// |part 0| <= |part 1|: the good-index conclusions hold, the small part has
// one block per good couple, the formula cap never exceeds balanced_cap, and
// the compacted good universe forms an aligned interval partition again. The
// same conclusions are also re-checked on non-neat balanced intervals.
struct GoodIndexAudit {
    int n = 0;
    int neat_checked = 0;  // neat balanced ordered intervals examined
    int all_checked = 0;   // balanced ordered intervals examined
    bool ok = false;
    std::string failure;
};
GoodIndexAudit audit_good_indices(int n);

// Verifies that the rectangles disjointly cover exactly the image of the
// target language, then evaluates the telescoping identity and the implied
// size bounds after neat normalization.
struct CoverBoundRow {
    long long in_a = 0, in_b = 0;  // per input rectangle
};
struct CoverBoundReport {
    int n = 0, m = 0;
    std::size_t ell = 0;       // input rectangles
    std::size_t ell_neat = 0;  // pieces after make_neat on every rectangle
    int max_inflation = 0;     // largest piece count of a single rectangle
    big_int gap;               // 12^m - 2^{3m}
    long long telescoped = 0;  // sum of per-rectangle signed gaps
    bool telescoping_ok = false;
    big_int min_ell_neat;  // ceil(gap / balanced_cap(m))
    big_int min_ell;       // ceil(gap / (256 * balanced_cap(m)))
    bool bound_ok = false;
    std::vector<CoverBoundRow> rows;
    bool ok = false;
};
CoverBoundReport cover_lower_bound(const std::vector<SetRectangle>& cover, int n);

// Reduction of a disjoint cover over half-length n = 4t + a (a in 1..3) to a
// disjoint cover over 4t: members containing spare positions are dropped, the
// surviving positions are renumbered, and each shrunken rectangle is re-split
// onto a rebalanced partition by grouping on the moved boundary positions.
struct FourRestriction {
    int old_n = 0, new_n = 0;
    std::vector<SetRectangle> pieces;  // disjoint cover of the reduced language
    std::vector<std::size_t> source;   // parallel: index of the originating rectangle
    int max_inflation = 0;             // largest piece count per source rectangle
    int max_moved = 0;                 // most boundary positions moved while rebalancing
};
FourRestriction restrict_to_multiple_of_four(const std::vector<SetRectangle>& cover, int n);

// Deterministic per-sample randomness: one engine per (seed, stream), raw bits,
// rejection sampling for bounded draws. Identical across platforms.
class SampleRng {
  public:
    SampleRng(std::uint64_t seed, std::uint64_t stream);
    bool coin();
    std::uint64_t bounded(std::uint64_t k);  // uniform over [0, k), k >= 1

  private:
    std::mt19937_64 eng_;
};
std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

// Sampling helpers, all with deterministic candidate order.
std::vector<std::uint32_t> submasks(std::uint32_t mask);  // ascending, 2^popcount entries
std::vector<std::uint32_t> member_projections(const ABLabels& ab, std::uint32_t mask);
SetRectangle sample_rectangle(const OrderedPartition& part, const ABLabels& ab,
                              bool projections_only, SampleRng& rng);

std::vector<OrderedPartition> balanced_intervals(int n);       // every (i, j, side)
std::vector<OrderedPartition> neat_balanced_intervals(int n);  // the block-aligned subset

}  // namespace fincfg
