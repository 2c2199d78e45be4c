// Rectangle covers of uniform-length languages.
//
// A rectangle splits every word into a fixed-width context (prefix of
// length n1, suffix of length n3) and a middle of length n2: it denotes
// { p m s : (p, s) in L1, m in L2 }. A cover is extracted from a grammar by
// walking, for the smallest remaining word, down its canonical parse tree
// to a node holding between a third and two thirds of the leaves; that
// node's positioned nonterminal yields one rectangle, its rules are
// removed, and the loop repeats until nothing is left.
//
// The set view encodes a word w of length 2n as the subset of a universe
// z_1..z_2n marking the 'a' positions; rectangles become products of
// subsets of the two parts of an interval-induced partition.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fincfg/grammar.hpp"

namespace fincfg {

struct Rectangle {
    std::vector<std::pair<std::string, std::string>> contexts; // L1, sorted pairs
    FiniteLanguage middles;                                    // L2
    std::size_t n1 = 0, n2 = 0, n3 = 0;
    bool degenerate = false; // emitted by the word-length < 3 fallback

    std::size_t word_length() const { return n1 + n2 + n3; }
    // Balanced: n2 within [N/3, 2N/3], compared exactly.
    bool balanced() const;
    std::vector<std::string> denotation() const;
};

// A grammar in normal form whose nonterminals additionally carry the
// absolute start position of the slice they derive ("A@3" derives a fixed
// width starting at position 3, 1-based). Every word of the underlying
// language has the same length N.
struct PositionedGrammar {
    Grammar g;
    std::size_t word_length = 0;
    // positioned name -> (base nonterminal, position)
    std::map<std::string, std::pair<std::string, std::size_t>> origin;
    // positioned name -> derived slice width
    std::map<std::string, std::size_t> width;
};

// Instantiates a normal-form grammar of a uniform-length language at every
// reachable (nonterminal, position) pair. Size grows by a factor of at
// most N. Parse trees correspond one to one, so ambiguity is unchanged.
PositionedGrammar position_index(const Grammar& cnf);

// The parse tree that prefers earlier rules at every node (split points in
// a positioned grammar are forced by the widths). Word must be derivable.
ParseTree canonical_parse_tree(const PositionedGrammar& pg, const std::string& word);

// Walks from the root towards the child with more leaves (left on ties)
// and stops at the first node with fewer than 2N/3 leaves; that node holds
// at least N/3 since its parent held at least 2N/3. Requires N >= 3.
// Returns the node's positioned nonterminal and its leaf count.
std::pair<std::string, std::size_t> find_balanced_nonterminal(const PositionedGrammar& pg,
                                                              const ParseTree& tree);

// The rectangle denoted by one positioned nonterminal: middles are the
// words it derives, contexts the (prefix, suffix) pairs the rest of the
// grammar can put around it. Its denotation is exactly the set of words
// with some parse tree through this nonterminal.
Rectangle rectangle_of_nonterminal(const PositionedGrammar& pg, const std::string& positioned_nt);

struct CoverResult {
    std::vector<Rectangle> rectangles;
    std::vector<std::string> chosen; // positioned nonterminal per step ("" for degenerate)
    bool degenerate = false;
    std::size_t word_length = 0;
    std::size_t cnf_size = 0; // rectangle count is bounded by N * cnf_size
    FiniteLanguage language;  // language of the input grammar
};

CoverResult extract_rectangle_cover(const Grammar& g, const EnumLimits& limits = {});

struct CoverReport {
    bool union_matches = false;
    bool all_balanced = false;
    bool disjoint = false;
    bool within_bound = false;
    std::size_t rectangle_count = 0;
    std::vector<std::string> failures; // verification findings, not errors

    struct Entry {
        std::size_t n1, n2, n3;
        std::size_t contexts, middles;
        std::size_t denotation_size;
        bool balanced;
    };
    std::vector<Entry> entries;

    bool ok(bool require_disjoint) const {
        return union_matches && all_balanced && within_bound && (!require_disjoint || disjoint);
    }
};

// Checks a cover against the language it came from. Findings are recorded
// in the report, never thrown. Degenerate covers skip the balance check.
CoverReport verify_cover(const CoverResult& cover, const FiniteLanguage& expected);

// ---- set perspective ----

// Subset of the universe z_1..z_2n as a bit mask; bit k-1 stands for z_k.
// z_i marks 'a' at word position i, z_{n+i} marks 'a' at position n+i.
struct SetWord {
    std::uint32_t bits = 0;
    int n = 0; // universe size is 2n

    bool operator==(const SetWord& o) const { return bits == o.bits && n == o.n; }
};

SetWord word_to_sets(const std::string& w); // throws OddLength on odd length
std::string sets_to_word(const SetWord& s);

// The two-part partition of z_1..z_2n induced by an interval [i, j]: one
// part is exactly Z[i, j], the other its complement. side says which.
struct OrderedPartition {
    int n = 0;
    int i = 1, j = 1;
    int side = 1; // part `side` equals Z[i, j]

    std::uint32_t universe_mask() const { return (n >= 16) ? 0xFFFFFFFFu : ((1u << (2 * n)) - 1); }
    std::uint32_t interval_mask() const;
    std::uint32_t part_mask(int part) const;
    int part_size(int part) const;
    // Both parts within [2n/3, 4n/3], compared exactly.
    bool balanced() const;
    bool operator==(const OrderedPartition& o) const {
        return n == o.n && i == o.i && j == o.j && side == o.side;
    }
};

// S holds subsets of part 0, T subsets of part 1; the rectangle denotes
// all unions U | V. Both lists are sorted and duplicate-free.
struct SetRectangle {
    OrderedPartition part;
    std::vector<std::uint32_t> S;
    std::vector<std::uint32_t> T;

    std::vector<std::uint32_t> denotation() const;
};

// Word rectangles map onto the set view with the middle interval
// [n1+1, n1+n2] as part 1: contexts become subsets of the complement via
// w1 b^n2 w3, middles subsets of the interval via b^n1 w2 b^n3.
SetRectangle rectangle_to_set_rectangle(const Rectangle& r);

} // namespace fincfg
