// Plain-text formats for grammars and automata.
//
// Grammar files:
//   @start A1
//   A1 -> B0 A0 | A0 B0
//   B0 -> a | b
// One '@start' line, then rule lines. Tokens are whitespace separated; a
// terminal is a single lowercase letter, a nonterminal any token starting
// with an uppercase letter. '|' separates alternatives that share the line's
// left-hand side. Rule order in the file is the grammar's rule order, and
// parse(print(g)) == g exactly.
//
// Automaton files are line based:
//   state q0
//   init q0
//   acc q3
//   tr q0 a q1
#pragma once

#include <iosfwd>
#include <string>

#include "fincfg/constructions.hpp"
#include "fincfg/grammar.hpp"

namespace fincfg {

Grammar parse_grammar(const std::string& text);
std::string print_grammar(const Grammar& g);

Nfa parse_nfa(const std::string& text);
std::string print_nfa(const Nfa& nfa);

// Whole-file helpers; throw IoError on filesystem failures.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace fincfg
