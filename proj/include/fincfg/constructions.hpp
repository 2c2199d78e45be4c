// Generators for the word family studied here and for the grammars and
// automata that recognize it.
//
// L(n) is the set of words over {a, b} of length 2n that carry an 'a' at
// some pair of positions exactly n apart. All generators below target L(n)
// for their respective parameter.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fincfg/grammar.hpp"

namespace fincfg {

// All words of L(n), built by filtering the 2^(2n) candidates. The count is
// always obtained this way, never from a closed formula.
FiniteLanguage language_Ln(int n, int cap_n = 12);

// Doubling-chain grammar with parameter t >= 1. Start A<t>. Ambiguous, size
// exactly 6t + 10, recognizes L(2^t + 1). A<i> tracks a block holding the
// marked insertion, B<i> a free block of length 2^i.
Grammar grammar_kmn(int t);

// Logarithmic-size grammar for L(n), n >= 1. The free part of a word is cut
// into power-of-two blocks (the binary digits of n-1); a tree of C/D
// nonterminals picks the one block that receives the inserted a-pair, and
// A<i> walks that block down to the insertion point. Both descent orders
// (block then insertion, insertion then block) are generated; with only one
// of them, insertions at the left block edge are unreachable.
Grammar grammar_log(int n);

// Unambiguous grammar for L(n): a word is classified by the first position
// i carrying a matched a-pair. The prefix pair (w, u) before the two a's is
// spelled out literally for every combination with no earlier matched pair,
// 3^(i-1) combinations per class, which is what makes this grammar big.
// Refuses n above the cap unless allow_big.
Grammar grammar_unambiguous(int n, bool allow_big = false, int cap_n = 7);

// The complement-pair variant: only prefix pairs (w, complement of w) are
// generated. Misses words whose first matched pair is not the complement
// pattern (baba at n = 2), so its language is a proper subset of L(n) for
// n >= 2. Kept to document the gap; unambiguous on the language it does
// generate.
Grammar grammar_unambiguous_paper(int n, bool allow_big = false, int cap_n = 7);

struct Nfa {
    std::vector<std::string> states;
    std::vector<std::string> initial;
    std::vector<std::string> accepting;
    // (from, letter, to)
    std::vector<std::tuple<std::string, char, std::string>> transitions;
};

// Nondeterministic automaton for L(n): guess the left position of the
// matched pair, then check both letters. One chain per guess, with states
// merged whenever their residual languages are equal. State counts are
// reported by measurement only; no closed form is asserted.
Nfa nfa_guess_verify(int n);

bool nfa_accepts(const Nfa& nfa, const std::string& word);

} // namespace fincfg
