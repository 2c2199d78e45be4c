// Error kinds shared across the library. Every failure carries a kind so
// callers (and the command line tool) can map it to an exit status without
// string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace fincfg {

enum class errc {
    bad_argument,
    empty_language,
    infinite_language,
    empty_word_derivable,
    cap_exceeded,
    mixed_lengths,
    odd_length,
    not_divisible_by_4,
    unbalanceable_at_this_n,
    not_a_cover,
    not_disjoint,
    parse_error,
    io_error,
};

inline const char* errc_name(errc k) {
    switch (k) {
    case errc::bad_argument: return "BadArgument";
    case errc::empty_language: return "EmptyLanguage";
    case errc::infinite_language: return "InfiniteLanguage";
    case errc::empty_word_derivable: return "EmptyWordDerivable";
    case errc::cap_exceeded: return "CapExceeded";
    case errc::mixed_lengths: return "MixedLengths";
    case errc::odd_length: return "OddLength";
    case errc::not_divisible_by_4: return "NotDivisibleBy4";
    case errc::unbalanceable_at_this_n: return "UnbalanceableAtThisN";
    case errc::not_a_cover: return "NotACover";
    case errc::not_disjoint: return "NotDisjoint";
    case errc::parse_error: return "ParseError";
    case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(errc kind, const std::string& what)
        : std::runtime_error(std::string(errc_name(kind)) + ": " + what), kind_(kind) {}

    errc kind() const { return kind_; }

private:
    errc kind_;
};

// Parse errors additionally carry a source position (1-based).
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& what)
        : Error(errc::parse_error,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

} // namespace fincfg
