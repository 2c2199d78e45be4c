// Context-free grammars for finite languages: the value types plus the
// core operations (pruning, finiteness, normal form, enumeration, parse
// tree counting, ambiguity detection).
//
// Conventions used throughout:
//   - a terminal is a single lowercase letter; a nonterminal is any token
//     whose first character is uppercase,
//   - no rule has an empty right-hand side, so the empty word is never
//     derivable and every word has length >= 1,
//   - a grammar's rule list is ordered and duplicate-free; the order is
//     part of the value (canonical parse trees prefer earlier rules),
//   - grammar size is the total number of right-hand-side symbols.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fincfg/error.hpp"

namespace fincfg {

using big_int = boost::multiprecision::cpp_int;

inline bool is_terminal(const std::string& sym) {
    return sym.size() == 1 && sym[0] >= 'a' && sym[0] <= 'z';
}

inline bool is_nonterminal(const std::string& sym) {
    return !sym.empty() && sym[0] >= 'A' && sym[0] <= 'Z';
}

// Shorter words first, then lexicographic with 'a' < 'b'. This is the
// canonical order for all word lists in this library.
inline bool shortlex_less(const std::string& x, const std::string& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
}

struct Rule {
    std::string lhs;
    std::vector<std::string> rhs; // never empty

    bool operator==(const Rule& o) const { return lhs == o.lhs && rhs == o.rhs; }
};

struct Grammar {
    std::vector<Rule> rules; // declared order, part of the value
    std::string start;
};

// A set of words, kept shortlex sorted and duplicate-free. uniform_length
// is set when every word has the same length.
struct FiniteLanguage {
    std::vector<std::string> words;
    std::optional<std::size_t> uniform_length;

    bool contains(const std::string& w) const;
    bool operator==(const FiniteLanguage& o) const { return words == o.words; }
};

FiniteLanguage make_language(std::vector<std::string> words);

struct ParseTree {
    std::string symbol; // nonterminal at inner nodes, terminal at leaves
    std::vector<ParseTree> children;

    std::size_t leaf_count() const;
    std::string yield() const;
};

// Enumeration guards. Word length is capped by max_word_length; the total
// number of distinct words stored per nonterminal by max_words.
struct EnumLimits {
    std::size_t max_words = std::size_t{1} << 24;
    std::size_t max_word_length = 64;
};

// Validates the basic invariants (nonempty rhs, symbol shapes, no duplicate
// rules, start present) and returns the grammar unchanged.
Grammar make_grammar(std::vector<Rule> rules, std::string start);

std::size_t grammar_size(const Grammar& g);

// Drops nonterminals that are unproductive or unreachable, keeping rule
// order. Throws EmptyLanguage when the start symbol itself is useless.
Grammar prune_useless(const Grammar& g);

// Throws InfiniteLanguage with a witness cycle when some useful nonterminal
// can reach itself. A pruned grammar passing this check has a finite
// language and an acyclic nonterminal dependency graph.
void assert_finite(const Grammar& g);

// Chomsky normal form: every rule becomes A -> B C or A -> a. The language
// is unchanged and the number of parse trees per word is preserved for
// words of length >= 2 (single-letter multiplicities cannot be expressed
// in normal form; is_unambiguous counts those directly on the input).
// Output size is at most size(g)^2. Input must be finite (checked).
Grammar to_cnf(const Grammar& g);

FiniteLanguage enumerate_language(const Grammar& g, const EnumLimits& limits = {});

// Number of parse trees of w under g. Requires g in normal form.
big_int count_parse_trees(const Grammar& cnf, const std::string& word);

struct AmbiguityResult {
    bool unambiguous = true;
    std::string witness;   // shortlex-smallest word with >= 2 trees
    big_int witness_trees; // its tree count
};

AmbiguityResult is_unambiguous(const Grammar& g, const EnumLimits& limits = {});

// Derived word length per nonterminal. Only defined when every nonterminal
// derives words of a single length; otherwise throws MixedLengths naming
// the offending nonterminal and two conflicting lengths.
std::map<std::string, std::size_t> nonterminal_lengths(const Grammar& g);

// Nonterminals ordered so that every nonterminal appearing on some rule's
// right-hand side comes before the rule's left-hand side (dependencies
// first, start last). Requires a finite grammar.
std::vector<std::string> topological_nonterminals(const Grammar& g);

} // namespace fincfg
