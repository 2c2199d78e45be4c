#include "doctest.h"

#include <algorithm>
#include <set>

#include "fincfg/constructions.hpp"
#include "fincfg/error.hpp"
#include "fincfg/rectangles.hpp"
#include "oracle.hpp"

using namespace fincfg;

namespace {

// The k-indexed covering family for L(n): rectangle k fixes an 'a' at
// positions k+1 and k+1+n and frees every other letter. Unions to L(n)
// but overlaps wherever a word has two matched pairs.
CoverResult positional_cover(int n) {
    CoverResult cover;
    cover.word_length = 2 * (std::size_t)n;
    cover.cnf_size = 0; // bare rectangle list, no grammar behind it
    cover.language = language_Ln(n);
    std::vector<std::string> free1;
    for (std::uint32_t bits = 0; bits < (1u << (n - 1)); ++bits) {
        std::string w((std::size_t)n - 1, 'b');
        for (int i = 0; i < n - 1; ++i)
            if (bits >> i & 1) w[(std::size_t)i] = 'a';
        free1.push_back(w);
    }
    for (int k = 0; k < n; ++k) {
        Rectangle r;
        r.n1 = (std::size_t)k;
        r.n2 = (std::size_t)n + 1;
        r.n3 = (std::size_t)(n - 1 - k);
        std::set<std::pair<std::string, std::string>> ctx;
        for (const auto& w : free1)
            ctx.insert({w.substr(0, (std::size_t)k), w.substr((std::size_t)k)});
        r.contexts.assign(ctx.begin(), ctx.end());
        std::vector<std::string> mids;
        for (const auto& w : free1)
            mids.push_back("a" + w + "a");
        r.middles = make_language(std::move(mids));
        cover.rectangles.push_back(std::move(r));
        cover.chosen.push_back("");
    }
    return cover;
}

} // namespace

TEST_CASE("position index pins nonterminals to absolute positions") {
    Grammar g = make_grammar({{"S", {"A", "B"}}, {"A", {"a"}}, {"B", {"b"}}}, "S");
    PositionedGrammar pg = position_index(g);
    CHECK(pg.word_length == 2);
    CHECK(pg.g.start == "S@1");
    CHECK(pg.width.at("S@1") == 2);
    CHECK(pg.width.at("A@1") == 1);
    CHECK(pg.width.at("B@2") == 1);
    CHECK(pg.origin.at("B@2") == std::pair<std::string, std::size_t>{"B", 2});
    CHECK(enumerate_language(pg.g).words == std::vector<std::string>{"ab"});
}

TEST_CASE("position index requires normal form") {
    CHECK_THROWS_AS(position_index(make_grammar({{"S", {"a", "a"}}}, "S")), Error);
}

TEST_CASE("canonical parse tree derives the word and prefers earlier rules") {
    Grammar cnf = to_cnf(grammar_kmn(1));
    PositionedGrammar pg = position_index(cnf);
    ParseTree t = canonical_parse_tree(pg, "aaaaaa");
    CHECK(t.yield() == "aaaaaa");
    CHECK(t.leaf_count() == 6);
    CHECK_THROWS_AS(canonical_parse_tree(pg, "bbbbbb"), Error);
}

TEST_CASE("balanced nonterminal holds between a third and two thirds of the leaves") {
    Grammar cnf = to_cnf(grammar_log(3));
    PositionedGrammar pg = position_index(cnf);
    for (const auto& w : enumerate_language(cnf).words) {
        auto [nt, leaves] = find_balanced_nonterminal(pg, canonical_parse_tree(pg, w));
        CHECK(3 * leaves >= w.size());
        CHECK(3 * leaves <= 2 * w.size());
        CHECK(pg.width.at(nt) == leaves);
    }
}

TEST_CASE("rectangle of a nonterminal denotes the words parsed through it") {
    Grammar cnf = to_cnf(grammar_log(2));
    PositionedGrammar pg = position_index(cnf);
    auto [nt, leaves] = find_balanced_nonterminal(pg, canonical_parse_tree(pg, "aaaa"));
    Rectangle r = rectangle_of_nonterminal(pg, nt);
    CHECK(r.word_length() == 4);
    CHECK(r.n2 == leaves);
    auto den = r.denotation();
    CHECK(std::find(den.begin(), den.end(), "aaaa") != den.end());
    FiniteLanguage lang = enumerate_language(cnf);
    for (const auto& w : den) CHECK(lang.contains(w));
    CHECK_THROWS_AS(rectangle_of_nonterminal(pg, "Z@9"), Error);
}

TEST_CASE("extracted covers pass verification") {
    for (int n = 2; n <= 4; ++n) {
        CoverResult cover = extract_rectangle_cover(grammar_log(n));
        CoverReport rep = verify_cover(cover, language_Ln(n));
        CHECK(rep.union_matches);
        CHECK(rep.all_balanced);
        CHECK(rep.within_bound);
        CHECK(rep.ok(false));
        CHECK(rep.rectangle_count == cover.rectangles.size());
        CHECK(cover.rectangles.size() <= cover.word_length * cover.cnf_size);
    }
}

TEST_CASE("covers from an unambiguous grammar are disjoint") {
    for (int n = 2; n <= 3; ++n) {
        CoverResult cover = extract_rectangle_cover(grammar_unambiguous(n));
        CoverReport rep = verify_cover(cover, language_Ln(n));
        CHECK(rep.disjoint);
        CHECK(rep.ok(true));
        CHECK(rep.failures.empty());
    }
}

TEST_CASE("ambiguous grammars can produce overlapping rectangles") {
    CoverResult cover = extract_rectangle_cover(grammar_kmn(1));
    CoverReport rep = verify_cover(cover, language_Ln(3));
    CHECK(rep.union_matches);
    CHECK(rep.ok(false));
}

TEST_CASE("short words fall back to one degenerate rectangle per word") {
    Grammar g = make_grammar({{"S", {"a", "b"}}, {"S", {"b", "a"}}}, "S");
    CoverResult cover = extract_rectangle_cover(g);
    CHECK(cover.degenerate);
    CHECK(cover.rectangles.size() == 2);
    for (const Rectangle& r : cover.rectangles) CHECK(r.degenerate);
    CoverReport rep = verify_cover(cover, enumerate_language(g));
    CHECK(rep.union_matches);
    CHECK(rep.ok(false));
}

TEST_CASE("verification flags a wrong union and overlapping rectangles") {
    CoverResult cover = positional_cover(3);
    CoverReport rep = verify_cover(cover, language_Ln(3));
    CHECK(rep.union_matches);
    CHECK(rep.all_balanced);
    CHECK(rep.within_bound); // no grammar: the grammar size bound is not applicable
    CHECK(!rep.disjoint);    // aabaab has matched pairs at two offsets
    CHECK(rep.ok(false));
    CHECK(!rep.ok(true));
    CHECK(!rep.failures.empty());

    // drop one rectangle: the union misses every word whose only pair sits there
    CoverResult broken = positional_cover(3);
    broken.rectangles.pop_back();
    broken.chosen.pop_back();
    CoverReport bad = verify_cover(broken, language_Ln(3));
    CHECK(!bad.union_matches);
    CHECK(!bad.ok(false));
}

TEST_CASE("set view encodes a-positions as mask bits") {
    SetWord s = word_to_sets("abab");
    CHECK(s.n == 2);
    CHECK(s.bits == 0b0101u); // a at positions 1 and 3
    CHECK(sets_to_word(s) == "abab");
    CHECK_THROWS_AS(word_to_sets("aba"), Error);
    CHECK_THROWS_AS(word_to_sets("abc" "c"), Error);
    for (const auto& w : language_Ln(3).words) CHECK(sets_to_word(word_to_sets(w)) == w);
}

TEST_CASE("ordered partitions expose interval masks and balance") {
    OrderedPartition p{4, 3, 6, 1};
    CHECK(p.interval_mask() == 0b00111100u);
    CHECK(p.part_mask(1) == 0b00111100u);
    CHECK(p.part_mask(0) == 0b11000011u);
    CHECK(p.part_size(0) == 4);
    CHECK(p.balanced());
    CHECK(!OrderedPartition{4, 1, 2, 1}.balanced());
    CHECK(!OrderedPartition{4, 1, 6, 1}.balanced());
    // the bounds [2n/3, 4n/3] are inclusive and compared exactly
    CHECK(OrderedPartition{3, 1, 2, 1}.balanced());
    CHECK(OrderedPartition{3, 1, 4, 1}.balanced());
}

TEST_CASE("word rectangles translate to interval set rectangles") {
    // contexts {(aa, aa)}, middles all 16 free words: interval [3, 6]
    Rectangle r;
    r.n1 = 2;
    r.n2 = 4;
    r.n3 = 2;
    r.contexts = {{"aa", "aa"}};
    std::vector<std::string> mids;
    for (std::uint32_t bits = 0; bits < 16; ++bits) {
        std::string w(4, 'b');
        for (int i = 0; i < 4; ++i)
            if (bits >> i & 1) w[(std::size_t)i] = 'a';
        mids.push_back(w);
    }
    r.middles = make_language(std::move(mids));

    SetRectangle sr = rectangle_to_set_rectangle(r);
    CHECK(sr.part.n == 4);
    CHECK(sr.part.i == 3);
    CHECK(sr.part.j == 6);
    CHECK(sr.part.side == 1);
    REQUIRE(sr.S.size() == 1);
    CHECK(sr.S[0] == 0b11000011u); // a at positions 1, 2, 7, 8
    CHECK(sr.T.size() == 16);
    CHECK(sr.denotation().size() == 16);

    // denotation agrees with the word-level one
    std::set<std::uint32_t> expect;
    for (const auto& w : r.denotation()) expect.insert(word_to_sets(w).bits);
    std::vector<std::uint32_t> den = sr.denotation();
    std::set<std::uint32_t> got(den.begin(), den.end());
    CHECK(got == expect);
}

TEST_CASE("set rectangles from extracted covers denote the same words") {
    CoverResult cover = extract_rectangle_cover(grammar_unambiguous(3));
    for (const auto& r : cover.rectangles) {
        SetRectangle sr = rectangle_to_set_rectangle(r);
        std::set<std::uint32_t> expect;
        for (const auto& w : r.denotation()) expect.insert(word_to_sets(w).bits);
        std::vector<std::uint32_t> den = sr.denotation();
        std::set<std::uint32_t> got(den.begin(), den.end());
        CHECK(got == expect);
        CHECK(sr.part.part_size(1) == (int)r.n2);
    }
}
