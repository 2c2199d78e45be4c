#include "fincfg/textio.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace fincfg {

namespace {

struct Token {
    std::string text;
    int column; // 1-based start position
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') { ++i; continue; }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        out.push_back({line.substr(start, i - start), (int)start + 1});
    }
    return out;
}

} // namespace

Grammar parse_grammar(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string start;
    bool have_start = false;
    std::vector<Rule> rules;

    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;

        if (toks[0].text == "@start") {
            if (have_start)
                throw ParseError(lineno, toks[0].column, "duplicate @start line");
            if (toks.size() != 2 || !is_nonterminal(toks[1].text))
                throw ParseError(lineno, toks.size() > 1 ? toks[1].column : toks[0].column,
                                 "@start expects a single nonterminal");
            start = toks[1].text;
            have_start = true;
            continue;
        }

        if (!is_nonterminal(toks[0].text))
            throw ParseError(lineno, toks[0].column,
                             "expected a nonterminal on the left-hand side, got '" + toks[0].text + "'");
        if (toks.size() < 2 || toks[1].text != "->")
            throw ParseError(lineno, toks.size() > 1 ? toks[1].column : toks[0].column,
                             "expected '->' after the left-hand side");

        Rule cur{toks[0].text, {}};
        int alt_col = toks.size() > 2 ? toks[2].column : toks[1].column;
        for (std::size_t t = 2; t <= toks.size(); ++t) {
            bool flush = (t == toks.size()) || toks[t].text == "|";
            if (flush) {
                if (cur.rhs.empty())
                    throw ParseError(lineno, t < toks.size() ? toks[t].column : alt_col,
                                     "empty alternative (the empty word is not allowed)");
                rules.push_back(cur);
                cur.rhs.clear();
                if (t < toks.size()) alt_col = toks[t].column;
                continue;
            }
            const std::string& sym = toks[t].text;
            if (!is_terminal(sym) && !is_nonterminal(sym))
                throw ParseError(lineno, toks[t].column,
                                 "'" + sym + "' is neither a terminal (one lowercase letter) nor a nonterminal");
            cur.rhs.push_back(sym);
        }
    }

    if (!have_start) throw ParseError(lineno + 1, 1, "missing @start line");
    try {
        return make_grammar(std::move(rules), std::move(start));
    } catch (const Error& e) {
        throw ParseError(lineno + 1, 1, e.what());
    }
}

std::string print_grammar(const Grammar& g) {
    std::string out = "@start " + g.start + "\n";
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        if (i > 0 && g.rules[i].lhs == g.rules[i - 1].lhs) {
            out += " |";
        } else {
            if (i > 0) out += "\n";
            out += g.rules[i].lhs + " ->";
        }
        for (const auto& s : g.rules[i].rhs) out += " " + s;
    }
    if (!g.rules.empty()) out += "\n";
    return out;
}

Nfa parse_nfa(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    Nfa nfa;
    std::set<std::string> known;

    auto need_state = [&](const Token& t, int ln) {
        if (!known.count(t.text))
            throw ParseError(ln, t.column, "state '" + t.text + "' not declared");
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0].text;
        if (kw == "state" && toks.size() == 2) {
            if (!known.insert(toks[1].text).second)
                throw ParseError(lineno, toks[1].column, "state '" + toks[1].text + "' declared twice");
            nfa.states.push_back(toks[1].text);
        } else if (kw == "init" && toks.size() == 2) {
            need_state(toks[1], lineno);
            nfa.initial.push_back(toks[1].text);
        } else if (kw == "acc" && toks.size() == 2) {
            need_state(toks[1], lineno);
            nfa.accepting.push_back(toks[1].text);
        } else if (kw == "tr" && toks.size() == 4) {
            need_state(toks[1], lineno);
            need_state(toks[3], lineno);
            if (toks[2].text.size() != 1 || toks[2].text[0] < 'a' || toks[2].text[0] > 'z')
                throw ParseError(lineno, toks[2].column, "transition letter must be one lowercase letter");
            nfa.transitions.emplace_back(toks[1].text, toks[2].text[0], toks[3].text);
        } else {
            throw ParseError(lineno, toks[0].column,
                             "expected 'state <s>', 'init <s>', 'acc <s>' or 'tr <s> <letter> <s>'");
        }
    }
    return nfa;
}

std::string print_nfa(const Nfa& nfa) {
    std::string out;
    for (const auto& s : nfa.states) out += "state " + s + "\n";
    for (const auto& s : nfa.initial) out += "init " + s + "\n";
    for (const auto& s : nfa.accepting) out += "acc " + s + "\n";
    for (const auto& [from, c, to] : nfa.transitions)
        out += "tr " + from + " " + std::string(1, c) + " " + to + "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(errc::io_error, "read failure on " + path);
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error(errc::io_error, "write failure on " + path);
}

} // namespace fincfg
