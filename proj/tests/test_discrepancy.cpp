#include "doctest.h"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "fincfg/constructions.hpp"
#include "fincfg/discrepancy.hpp"
#include "fincfg/error.hpp"
#include "fincfg/rectangles.hpp"

using namespace fincfg;

namespace {

SetRectangle full_rectangle(const OrderedPartition& p) {
    SetRectangle r;
    r.part = p;
    r.S = submasks(p.part_mask(0));
    r.T = submasks(p.part_mask(1));
    return r;
}

std::vector<SetRectangle> cover_from_grammar(const Grammar& g) {
    CoverResult cover = extract_rectangle_cover(g);
    std::vector<SetRectangle> out;
    for (const auto& r : cover.rectangles) out.push_back(rectangle_to_set_rectangle(r));
    return out;
}

// Disjoint cover of the image of L(6), classified by the position k of the
// first matched a-pair. Class 1 deliberately sits on the wide interval
// [1, 8]: dropping the spare pair (positions 5, 6, 11, 12) leaves it six
// wide over an eight-position universe, which forces the rebalance path of
// restrict_to_multiple_of_four. Classes k >= 2 spell out the prefix pair
// (w at 1..k-1, u at 7..k+5) with no position where both carry a.
std::vector<SetRectangle> first_pair_cover_n6() {
    std::vector<SetRectangle> cover;
    {
        SetRectangle r;
        r.part = {6, 1, 8, 1};
        const int free1[] = {1, 2, 3, 4, 5, 7}; // bits of positions 2..6 and 8
        for (std::uint32_t s = 0; s < 64; ++s) {
            std::uint32_t v = (1u << 0) | (1u << 6); // a at positions 1 and 7
            for (int b = 0; b < 6; ++b)
                if (s >> b & 1) v |= 1u << free1[b];
            r.T.push_back(v);
        }
        for (std::uint32_t s = 0; s < 16; ++s) r.S.push_back(s << 8); // positions 9..12
        std::sort(r.T.begin(), r.T.end());
        cover.push_back(std::move(r));
    }
    for (int k = 2; k <= 6; ++k) {
        for (std::uint32_t w = 0; w < (1u << (k - 1)); ++w)
            for (std::uint32_t u = 0; u < (1u << (k - 1)); ++u) {
                if ((w & u) != 0) continue; // a common a would move the first pair left
                SetRectangle r;
                r.part = {6, k + 1, k + 6, 1};
                std::uint32_t base1 = (u << 6) | (1u << (k + 5));
                for (std::uint32_t s = 0; s < (1u << (6 - k)); ++s)
                    r.T.push_back(base1 | (s << k)); // free tail at positions k+1..6
                std::uint32_t base0 = w | (1u << (k - 1));
                for (std::uint32_t s = 0; s < (1u << (6 - k)); ++s)
                    r.S.push_back(base0 | (s << (k + 6))); // free tail at positions k+7..12
                cover.push_back(std::move(r));
            }
    }
    return cover;
}

} // namespace

TEST_CASE("interval families tile the core and mark the spare pairs") {
    IntervalFamily f8 = interval_family(8);
    CHECK(f8.n == 8);
    CHECK(f8.m == 2);
    CHECK(f8.intervals == std::vector<std::uint32_t>{0x0Fu, 0xF0u, 0x0F00u, 0xF000u});
    CHECK(f8.spare_mask == 0u);

    IntervalFamily f5 = interval_family(5);
    CHECK(f5.n == 4);
    CHECK(f5.m == 1);
    CHECK(f5.intervals == std::vector<std::uint32_t>{0x0Fu, 0x0Fu << 5});
    CHECK(f5.spare_mask == ((1u << 4) | (1u << 9)));

    // below one block the core is empty and every pair is spare
    IntervalFamily f3 = interval_family(3);
    CHECK(f3.n == 0);
    CHECK(f3.intervals.empty());
    CHECK(f3.spare_mask == 0b111111u);

    CHECK_THROWS_AS(interval_family(0), Error);
    CHECK_THROWS_AS(interval_family(17), Error);
}

TEST_CASE("matched pairs are detected by shifted intersection") {
    CHECK(has_matching_pair(0b0101u, 2));      // a at positions 1 and 3
    CHECK(!has_matching_pair(0b0011u, 2));     // a at positions 1 and 2
    CHECK(has_matching_pair(0b000010001u, 4)); // positions 1 and 5
    CHECK(!has_matching_pair(0u, 4));
    for (const auto& w : language_Ln(3).words) CHECK(has_matching_pair(word_to_sets(w).bits, 3));
}

TEST_CASE("label construction enumerates one element per block") {
    ABLabels ab = build_ab(4);
    CHECK(ab.members.size() == 16);
    CHECK(ab.a_count == 4);
    CHECK(ab.b_count == 12);
    CHECK(std::is_sorted(ab.members.begin(), ab.members.end()));
    for (std::size_t i = 0; i < ab.members.size(); ++i) {
        std::uint32_t x = ab.members[i];
        CHECK(std::popcount(x & 0x0Fu) == 1);
        CHECK(std::popcount(x & 0xF0u) == 1);
        // odd marks an odd number of matched pair positions
        int matched = std::popcount(x & (x >> 4) & 0x0Fu);
        CHECK(ab.odd[i] == (matched % 2 == 1));
    }

    CHECK_THROWS_AS(build_ab(6), Error);
    CHECK_THROWS_AS(build_ab(16), Error); // default cap
    CHECK(build_ab(16, 16).members.size() == 65536);
}

TEST_CASE("counting identities hold and the gap inequality starts at m = 4") {
    CountingReport rep = verify_counting_lemma(12);
    CHECK(rep.ok);
    REQUIRE(rep.rows.size() == 3);
    const big_int gaps[] = {4, 80, 1216};
    for (int m = 1; m <= 3; ++m) {
        const CountingRow& row = rep.rows[(std::size_t)m - 1];
        CHECK(row.identities_ok);
        CHECK(row.a_inside);
        CHECK(row.gap == gaps[m - 1]);
    }
    CHECK(rep.first_holds == 4);
    REQUIRE(rep.scan.size() == 8);
    CHECK(!rep.scan[2].holds);
    CHECK(rep.scan[3].holds);
    CHECK(rep.scan[3].gap == 16640);
    // the decision is exact: 16640^2 = 276889600 > 2^28 = 268435456
    CHECK(rep.scan[3].gap * rep.scan[3].gap == 276889600);

    CHECK(verify_counting_lemma(4).ok);
    CHECK_THROWS_AS(verify_counting_lemma(3), Error);
}

TEST_CASE("caps are frozen") {
    CHECK(aligned_cap(1) == 8);
    CHECK(aligned_cap(2) == 64);
    CHECK(aligned_cap(3) == 512);
    CHECK(balanced_cap(1) == 10);
    CHECK(balanced_cap(2) == 101);
    CHECK(balanced_cap(3) == 1024);
    CHECK(balanced_cap(4) == 10321);
    // largest d with d^3 <= 2^(10m), checked at the edge
    CHECK(big_int(10) * 10 * 10 <= (big_int(1) << 10));
    CHECK(big_int(11) * 11 * 11 > (big_int(1) << 10));
}

TEST_CASE("the full aligned rectangle meets its cap exactly") {
    ABLabels ab = build_ab(4);
    SetRectangle r = full_rectangle({4, 1, 4, 1});
    DiscCounts c = rectangle_counts(r, ab);
    CHECK(c.in_a == 4);
    CHECK(c.in_b == 12);
    CHECK(c.disc() == 8);
    CHECK(c.signed_gap() == 4 - 12);
    CHECK(discrepancy(r, ab) == 8);
    CHECK(aligned_cap(1) == 8);
}

TEST_CASE("exhaustive interval maxima: the aligned cap fails off alignment") {
    // width-4 interval starting at i over universe 8; only i = 1 and i = 5
    // are block aligned, and only those stay within 2^3
    const long long expect[] = {0, 8, 9, 10, 9, 8};
    for (int i = 1; i <= 5; ++i) CHECK(max_interval_discrepancy(4, i) == expect[i]);
    CHECK_THROWS_AS(max_interval_discrepancy(8, 1), Error);
}

TEST_CASE("label parity is invariant under paired slot permutations") {
    ABLabels ab = build_ab(8);
    // permute slots inside couple (I_1, I_3) by reversal and couple
    // (I_2, I_4) by rotation, identically on both blocks of each couple
    auto slot_map = [](int block, int slot) {
        return block % 2 == 0 ? 3 - slot : (slot + 1) % 4;
    };
    std::set<std::uint32_t> remapped;
    std::size_t odd_count = 0;
    for (std::uint32_t x : ab.members) {
        std::uint32_t y = 0;
        for (int block = 0; block < 4; ++block) {
            std::uint32_t part = (x >> (4 * block)) & 0xFu;
            int slot = std::countr_zero(part);
            y |= 1u << (4 * block + slot_map(block, slot));
        }
        remapped.insert(y);
        if (std::popcount(y & (y >> 8) & 0xFFu) % 2 == 1) ++odd_count;
    }
    CHECK(remapped.size() == ab.members.size()); // the permutation acts on the family
    CHECK(std::equal(remapped.begin(), remapped.end(), ab.members.begin()));
    CHECK(odd_count == ab.a_count);
}

TEST_CASE("sampled width-n rectangles respect the aligned cap") {
    RestrictedReport rep = check_restricted_bound(4, 60, 7);
    CHECK(rep.n == 4);
    CHECK(rep.m == 1);
    REQUIRE(rep.rows.size() == 5);
    for (const RestrictedRow& row : rep.rows) {
        CHECK(row.samples == 60);
        CHECK(row.cap == 8);
        CHECK(row.aligned == ((row.i - 1) % 4 == 0));
        if (row.aligned) CHECK(row.violations == 0);
    }
    CHECK(rep.aligned_samples == 120);
    CHECK(rep.aligned_ok);
    CHECK(rep.aligned_max <= 8);

    RestrictedReport again = check_restricted_bound(4, 60, 7);
    CHECK(again.aligned_max == rep.aligned_max);
    CHECK(again.unaligned_max == rep.unaligned_max);
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
        CHECK(again.rows[i].max_disc == rep.rows[i].max_disc);
}

TEST_CASE("good indices split couples against the small part") {
    GoodIndexSet g = good_indices({8, 1, 8, 0});
    CHECK(g.good_count == 8);
    CHECK(g.good_mask == 0xFFu);
    CHECK(g.v_mask == 0xFFFFu);
    CHECK(g.part1_bad == 0u);
    CHECK(g.full_good_intervals == std::vector<int>{1, 2, 3, 4});
    CHECK(g.lemma_checked);
    CHECK(g.lemma_ok);

    // width 8 in the middle: still every couple is split
    GoodIndexSet mid = good_indices({8, 5, 12, 1});
    CHECK(mid.good_count == 8);
    CHECK(mid.lemma_checked);
    CHECK(mid.lemma_ok);

    // n = 12, small part [1,8]: couples 9..12 never touch part 0
    GoodIndexSet bad = good_indices({12, 1, 8, 0});
    CHECK(bad.good_count == 8);
    CHECK(bad.good_mask == 0xFFu);
    CHECK(bad.part1_bad == ((0xFu << 8) | (0xFu << 20)));
    CHECK(bad.full_good_intervals == std::vector<int>{1, 2, 4, 5});
    CHECK(bad.lemma_checked);
    CHECK(bad.lemma_ok);

    // non-neat hypotheses: conclusions still evaluated and true
    GoodIndexSet off = good_indices({8, 2, 9, 1});
    CHECK(!off.lemma_checked);
    CHECK(off.lemma_ok);
}

TEST_CASE("neatness means no block is straddled") {
    IntervalFamily f = interval_family(4);
    CHECK(is_neat({4, 1, 4, 1}, f));
    CHECK(is_neat({4, 5, 8, 0}, f));
    CHECK(is_neat({4, 1, 8, 1}, f));
    CHECK(!is_neat({4, 3, 6, 1}, f));
    CHECK(!is_neat({4, 2, 4, 1}, f));

    IntervalFamily f5 = interval_family(5);
    CHECK(is_neat({5, 1, 4, 1}, f5));  // spare positions are never constrained
    CHECK(!is_neat({5, 1, 3, 1}, f5));
}

TEST_CASE("make_neat on a straddling rectangle produces checked pieces") {
    IntervalFamily f = interval_family(4);
    SetRectangle r;
    r.part = {4, 3, 6, 1};
    r.S = {0b00000011u};  // z1 z2
    r.T = {0b00001100u};  // z3 z4
    NeatSplit split = make_neat(r, f);
    CHECK(split.gamma == OrderedPartition{4, 1, 4, 1});
    CHECK(split.cut_mask == 0xFFu);
    REQUIRE(split.pieces.size() == 1);
    CHECK(split.pieces[0].S == std::vector<std::uint32_t>{0});
    CHECK(split.pieces[0].T == std::vector<std::uint32_t>{0b1111u});
    CHECK(split.pieces[0].denotation() == std::vector<std::uint32_t>{0b1111u});

    // an already neat rectangle passes through unchanged
    SetRectangle neat = full_rectangle({4, 5, 8, 1});
    NeatSplit same = make_neat(neat, f);
    CHECK(same.gamma == neat.part);
    REQUIRE(same.pieces.size() == 1);
    CHECK(same.pieces[0].S == neat.S);

    SetRectangle thin = full_rectangle({4, 1, 2, 1});
    CHECK_THROWS_AS(make_neat(thin, f), Error); // unbalanced input is refused
}

TEST_CASE("make_neat is total over every balanced interval at desk sizes") {
    for (int n : {4, 8}) {
        IntervalFamily f = interval_family(n);
        for (const OrderedPartition& p : balanced_intervals(n)) {
            if (is_neat(p, f)) continue;
            SetRectangle r = full_rectangle(p);
            NeatSplit split = make_neat(r, f);
            CHECK(is_neat(split.gamma, f));
            CHECK(split.gamma.balanced());
            CHECK(split.pieces.size() <= 256);

            // pieces partition the denotation
            std::vector<bool> seen(std::size_t{1} << (2 * n), false);
            std::size_t covered = 0;
            bool overlap = false;
            for (const SetRectangle& piece : split.pieces)
                for (std::uint32_t w : piece.denotation()) {
                    if (seen[w]) overlap = true;
                    seen[w] = true;
                    ++covered;
                }
            CHECK(!overlap);
            CHECK(covered == r.S.size() * r.T.size());
        }
    }
}

TEST_CASE("make_neat sampling audit stays clean") {
    NeatSplitAudit audit = audit_make_neat(8, 40, 11);
    CHECK(audit.all_ok);
    CHECK(audit.failure.empty());
    CHECK(audit.max_pieces <= 256);
    CHECK(audit.samples == 40);
}

TEST_CASE("decomposition check on the fully aligned partition") {
    ABLabels ab = build_ab(8);
    GeneralBoundCheck chk = check_general_rectangle(full_rectangle({8, 1, 8, 0}), ab);
    CHECK(chk.ok);
    CHECK(chk.good_count == 8);
    CHECK(chk.alpha_count == 1);
    CHECK(chk.disc == 64); // |96 - 160|
    CHECK(chk.formula_cap == 64);
    CHECK(chk.cap == 101);
    CHECK(chk.renaming_ok);
    CHECK(chk.reduced_max <= chk.reduced_cap);
}

TEST_CASE("decomposition check with bad couples, caps coinciding") {
    ABLabels ab = build_ab(12);
    std::map<int, ABLabels> cache;
    GeneralBoundCheck chk = check_general_rectangle(full_rectangle({12, 1, 8, 0}), ab, &cache);
    CHECK(chk.ok);
    CHECK(chk.good_count == 8);
    CHECK(chk.alpha_count == 16);      // one slot choice per fully-bad block
    CHECK(chk.formula_cap == 1024);    // 2^4 * 2^6
    CHECK(chk.cap == 1024);            // balanced_cap(3): the bounds touch here
    CHECK(chk.renaming_ok);
    CHECK(big_int(chk.disc) <= chk.formula_cap);
    CHECK(big_int(chk.alpha_sum) >= big_int(chk.disc));

    // role normalization: the wide part may be part 0 as well
    GeneralBoundCheck swapped = check_general_rectangle(full_rectangle({12, 1, 8, 1}), ab, &cache);
    CHECK(swapped.ok);
    CHECK(swapped.good_count == 8);
}

TEST_CASE("sampled neat balanced rectangles respect balanced_cap") {
    GeneralReport rep = check_general_bound(8, 300, 5);
    CHECK(rep.all_ok);
    CHECK(rep.violations == 0);
    CHECK(rep.samples == 300);
    CHECK(rep.cap == 101);
    CHECK(big_int(rep.max_disc) <= rep.cap);

    GeneralReport again = check_general_bound(8, 300, 5);
    CHECK(again.max_disc == rep.max_disc);
}

TEST_CASE("exhaustive good-index audit at n = 8") {
    GoodIndexAudit audit = audit_good_indices(8);
    CHECK(audit.ok);
    CHECK(audit.failure.empty());
    CHECK(audit.neat_checked == 6);
    CHECK(audit.all_checked > audit.neat_checked);
}

TEST_CASE("cover lower bound telescopes exactly on a disjoint cover") {
    std::vector<SetRectangle> cover = cover_from_grammar(grammar_unambiguous(4));
    CoverBoundReport rep = cover_lower_bound(cover, 4);
    CHECK(rep.ok);
    CHECK(rep.m == 1);
    CHECK(rep.gap == 4);
    CHECK(rep.telescoped == 4);
    CHECK(rep.telescoping_ok);
    CHECK(rep.min_ell_neat == 1); // ceil(4 / 10)
    CHECK(rep.min_ell == 1);
    CHECK(rep.ell == cover.size());
    CHECK(rep.ell_neat >= rep.ell);
    CHECK(rep.bound_ok);
    CHECK(rep.rows.size() == cover.size());
    long long sum = 0;
    for (const CoverBoundRow& row : rep.rows) sum += row.in_a - row.in_b;
    CHECK((sum == 4 || sum == -4)); // the telescoped value is reported as a magnitude

    // errors: empty input, wrong n, missing words, overlaps
    CHECK_THROWS_AS(cover_lower_bound({}, 4), Error);
    CHECK_THROWS_AS(cover_lower_bound(cover, 6), Error);
    std::vector<SetRectangle> missing(cover.begin() + 1, cover.end());
    CHECK_THROWS_AS(cover_lower_bound(missing, 4), Error);
    std::vector<SetRectangle> doubled = cover;
    doubled.push_back(cover.front());
    CHECK_THROWS_AS(cover_lower_bound(doubled, 4), Error);
}

TEST_CASE("spare-pair restriction turns an n = 5 cover into an n = 4 cover") {
    std::vector<SetRectangle> cover = cover_from_grammar(grammar_unambiguous(5, true));
    FourRestriction res = restrict_to_multiple_of_four(cover, 5);
    CHECK(res.old_n == 5);
    CHECK(res.new_n == 4);
    CHECK(!res.pieces.empty());
    CHECK(res.source.size() == res.pieces.size());
    CHECK(res.max_inflation <= 4);
    CHECK(res.max_moved <= 2);

    CoverBoundReport after = cover_lower_bound(res.pieces, 4);
    CHECK(after.ok);
    CHECK(after.telescoped == 4);

    CHECK_THROWS_AS(restrict_to_multiple_of_four(cover, 8), Error);
    CHECK_THROWS_AS(restrict_to_multiple_of_four(cover, 4), Error);
}

TEST_CASE("restriction rebalances an interval left too wide by the spare drop") {
    std::vector<SetRectangle> cover = first_pair_cover_n6();
    CHECK(cover.size() == 1 + 3 + 9 + 27 + 81 + 243);
    FourRestriction res = restrict_to_multiple_of_four(cover, 6);
    CHECK(res.old_n == 6);
    CHECK(res.new_n == 4);
    CHECK(res.max_moved >= 1); // the [1, 8] rectangle must shed a position
    CHECK(res.max_moved <= 4); // at most 2a boundary moves at a = 2
    CHECK(res.max_inflation <= 16);
    CoverBoundReport after = cover_lower_bound(res.pieces, 4);
    CHECK(after.ok);
    CHECK(after.telescoped == 4);
}

TEST_CASE("sampling rng is deterministic per seed and stream") {
    SampleRng a(1, 2), b(1, 2), c(1, 3);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        bool ca = a.coin(), cb = b.coin(), cc = c.coin();
        all_equal = all_equal && ca == cb;
        any_diff = any_diff || ca != cc;
    }
    CHECK(all_equal);
    CHECK(any_diff);
    SampleRng d(9, 9), e(9, 9);
    for (int i = 0; i < 32; ++i) CHECK(d.bounded(10) == e.bounded(10));
    CHECK(mix_stream(1, 2, 3, 4) == mix_stream(1, 2, 3, 4));
    CHECK(mix_stream(1, 2, 3, 4) != mix_stream(1, 2, 3, 5));
}

TEST_CASE("submask enumeration is ascending and complete") {
    CHECK(submasks(0u) == std::vector<std::uint32_t>{0});
    CHECK(submasks(0b1010u) == std::vector<std::uint32_t>{0, 0b0010, 0b1000, 0b1010});
    CHECK(submasks(0xFFu).size() == 256);
}

TEST_CASE("interval partition generators are frozen at n = 4") {
    CHECK(balanced_intervals(4).size() == 30);
    CHECK(neat_balanced_intervals(4).size() == 4);
    IntervalFamily f = interval_family(4);
    for (const OrderedPartition& p : neat_balanced_intervals(4)) {
        CHECK(p.balanced());
        CHECK(is_neat(p, f));
    }
}
