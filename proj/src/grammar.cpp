#include "fincfg/grammar.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace fincfg {

namespace {

std::vector<std::string> nonterminal_list(const Grammar& g) {
    std::vector<std::string> nts;
    std::unordered_set<std::string> seen;
    auto add = [&](const std::string& s) {
        if (is_nonterminal(s) && seen.insert(s).second) nts.push_back(s);
    };
    add(g.start);
    for (const auto& r : g.rules) {
        add(r.lhs);
        for (const auto& s : r.rhs) add(s);
    }
    return nts;
}

std::unordered_map<std::string, std::vector<std::size_t>> rules_by_lhs(const Grammar& g) {
    std::unordered_map<std::string, std::vector<std::size_t>> idx;
    for (std::size_t i = 0; i < g.rules.size(); ++i) idx[g.rules[i].lhs].push_back(i);
    return idx;
}

} // namespace

bool FiniteLanguage::contains(const std::string& w) const {
    return std::binary_search(words.begin(), words.end(), w, shortlex_less);
}

FiniteLanguage make_language(std::vector<std::string> words) {
    std::sort(words.begin(), words.end(), shortlex_less);
    words.erase(std::unique(words.begin(), words.end()), words.end());
    FiniteLanguage lang;
    lang.words = std::move(words);
    if (!lang.words.empty()) {
        std::size_t len = lang.words.front().size();
        bool uniform = lang.words.back().size() == len; // sorted by length first
        if (uniform) lang.uniform_length = len;
    }
    return lang;
}

std::size_t ParseTree::leaf_count() const {
    if (children.empty()) return 1;
    std::size_t n = 0;
    for (const auto& c : children) n += c.leaf_count();
    return n;
}

std::string ParseTree::yield() const {
    if (children.empty()) return symbol;
    std::string out;
    for (const auto& c : children) out += c.yield();
    return out;
}

Grammar make_grammar(std::vector<Rule> rules, std::string start) {
    if (!is_nonterminal(start))
        throw Error(errc::bad_argument, "start symbol must be a nonterminal, got '" + start + "'");
    std::set<std::pair<std::string, std::vector<std::string>>> seen;
    for (const auto& r : rules) {
        if (!is_nonterminal(r.lhs))
            throw Error(errc::bad_argument, "rule left-hand side '" + r.lhs + "' is not a nonterminal");
        if (r.rhs.empty())
            throw Error(errc::empty_word_derivable, "rule for " + r.lhs + " has an empty right-hand side");
        for (const auto& s : r.rhs) {
            if (!is_terminal(s) && !is_nonterminal(s))
                throw Error(errc::bad_argument, "symbol '" + s + "' in a rule for " + r.lhs +
                                                    " is neither a terminal nor a nonterminal");
        }
        if (!seen.insert({r.lhs, r.rhs}).second) {
            std::string flat = r.lhs + " ->";
            for (const auto& s : r.rhs) flat += " " + s;
            throw Error(errc::bad_argument, "duplicate rule: " + flat);
        }
    }
    Grammar g;
    g.rules = std::move(rules);
    g.start = std::move(start);
    return g;
}

std::size_t grammar_size(const Grammar& g) {
    std::size_t n = 0;
    for (const auto& r : g.rules) n += r.rhs.size();
    return n;
}

Grammar prune_useless(const Grammar& g) {
    // Productive: derives at least one word. Fixpoint over rules.
    std::unordered_set<std::string> productive;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : g.rules) {
            if (productive.count(r.lhs)) continue;
            bool ok = true;
            for (const auto& s : r.rhs)
                if (is_nonterminal(s) && !productive.count(s)) { ok = false; break; }
            if (ok) { productive.insert(r.lhs); changed = true; }
        }
    }
    if (!productive.count(g.start))
        throw Error(errc::empty_language, "start symbol " + g.start + " derives no word");

    // Reachable through productive rules only.
    std::unordered_set<std::string> reachable{g.start};
    auto by_lhs = rules_by_lhs(g);
    std::vector<std::string> queue{g.start};
    while (!queue.empty()) {
        std::string nt = queue.back();
        queue.pop_back();
        auto it = by_lhs.find(nt);
        if (it == by_lhs.end()) continue;
        for (std::size_t ri : it->second) {
            const Rule& r = g.rules[ri];
            bool ok = true;
            for (const auto& s : r.rhs)
                if (is_nonterminal(s) && !productive.count(s)) { ok = false; break; }
            if (!ok) continue;
            for (const auto& s : r.rhs)
                if (is_nonterminal(s) && reachable.insert(s).second) queue.push_back(s);
        }
    }

    Grammar out;
    out.start = g.start;
    for (const auto& r : g.rules) {
        if (!reachable.count(r.lhs)) continue;
        bool ok = true;
        for (const auto& s : r.rhs)
            if (is_nonterminal(s) && !(productive.count(s) && reachable.count(s))) { ok = false; break; }
        if (ok) out.rules.push_back(r);
    }
    return out;
}

void assert_finite(const Grammar& g) {
    // Depth-first search over the nonterminal dependency graph of the pruned
    // grammar; a back edge gives the witness cycle.
    Grammar p = prune_useless(g);
    auto by_lhs = rules_by_lhs(p);
    std::unordered_map<std::string, int> state; // 0 new, 1 on stack, 2 done
    std::vector<std::string> stack;

    std::function<void(const std::string&)> visit = [&](const std::string& nt) {
        state[nt] = 1;
        stack.push_back(nt);
        auto it = by_lhs.find(nt);
        if (it != by_lhs.end()) {
            for (std::size_t ri : it->second) {
                for (const auto& s : p.rules[ri].rhs) {
                    if (!is_nonterminal(s)) continue;
                    int st = state.count(s) ? state[s] : 0;
                    if (st == 1) {
                        auto from = std::find(stack.begin(), stack.end(), s);
                        std::string cycle;
                        for (auto q = from; q != stack.end(); ++q) cycle += *q + " -> ";
                        cycle += s;
                        throw Error(errc::infinite_language, "dependency cycle " + cycle);
                    }
                    if (st == 0) visit(s);
                }
            }
        }
        state[nt] = 2;
        stack.pop_back();
    };
    visit(p.start);
}

std::vector<std::string> topological_nonterminals(const Grammar& g) {
    auto by_lhs = rules_by_lhs(g);
    std::vector<std::string> order;
    std::unordered_map<std::string, int> state;

    std::function<void(const std::string&)> visit = [&](const std::string& nt) {
        state[nt] = 1;
        auto it = by_lhs.find(nt);
        if (it != by_lhs.end()) {
            for (std::size_t ri : it->second)
                for (const auto& s : g.rules[ri].rhs) {
                    if (!is_nonterminal(s)) continue;
                    int st = state.count(s) ? state[s] : 0;
                    if (st == 1) throw Error(errc::infinite_language, "dependency cycle through " + s);
                    if (st == 0) visit(s);
                }
        }
        state[nt] = 2;
        order.push_back(nt);
    };
    for (const auto& nt : nonterminal_list(g))
        if (!state.count(nt)) visit(nt);
    return order;
}

namespace {

// Fresh names for rules introduced by the normal form transformation:
//   <lhs>#<ruleIndex>#<position>      suffix chain nonterminal
//   <lhs>#<ruleIndex>#<position>#t    lifted terminal at that position
//   <orig>#d<k>                       alias used to keep duplicate rules apart
std::string chain_name(const std::string& lhs, std::size_t ri, std::size_t pos) {
    return lhs + "#" + std::to_string(ri) + "#" + std::to_string(pos);
}
std::string lift_name(const std::string& lhs, std::size_t ri, std::size_t pos) {
    return chain_name(lhs, ri, pos) + "#t";
}

} // namespace

Grammar to_cnf(const Grammar& g) {
    for (const auto& r : g.rules)
        if (r.rhs.empty())
            throw Error(errc::empty_word_derivable, "rule for " + r.lhs + " has an empty right-hand side");
    assert_finite(g);
    Grammar p = prune_useless(g);

    // Break long rules into binary chains and lift terminals out of
    // multi-symbol rules. Unit rules (single nonterminal) survive this pass.
    Grammar bin;
    bin.start = p.start;
    for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
        const Rule& r = p.rules[ri];
        const std::size_t k = r.rhs.size();
        if (k == 1) {
            bin.rules.push_back(r);
            continue;
        }
        std::vector<std::string> syms(k);
        for (std::size_t pos = 0; pos < k; ++pos) {
            if (is_terminal(r.rhs[pos])) {
                syms[pos] = lift_name(r.lhs, ri, pos + 1);
                bin.rules.push_back({syms[pos], {r.rhs[pos]}});
            } else {
                syms[pos] = r.rhs[pos];
            }
        }
        std::string head = r.lhs;
        for (std::size_t pos = 0; pos + 2 < k; ++pos) {
            std::string tail = chain_name(r.lhs, ri, pos + 2);
            bin.rules.push_back({head, {syms[pos], tail}});
            head = tail;
        }
        bin.rules.push_back({head, {syms[k - 2], syms[k - 1]}});
    }

    // Remove unit rules by splicing in the target's rules. Targets are
    // processed first (the dependency graph is acyclic), so spliced lists
    // are already unit-free.
    auto order = topological_nonterminals(bin);
    std::unordered_map<std::string, std::vector<Rule>> final_rules;
    std::vector<std::string> lhs_order;
    for (const auto& nt : order) {
        std::vector<Rule> mine;
        for (const auto& r : bin.rules) {
            if (r.lhs != nt) continue;
            if (r.rhs.size() == 1 && is_nonterminal(r.rhs[0])) {
                for (const auto& sub : final_rules[r.rhs[0]])
                    mine.push_back({nt, sub.rhs});
            } else {
                mine.push_back(r);
            }
        }
        if (!mine.empty()) {
            final_rules[nt] = std::move(mine);
            lhs_order.push_back(nt);
        }
    }

    // Splicing can manufacture duplicate rules when two unit paths reach
    // the same body. Merging those would conflate distinct parse trees, so
    // the second copy points at an alias of the right component instead.
    // Single-terminal duplicates have no such escape in normal form and are
    // merged; is_unambiguous counts single-letter words on the raw grammar.
    Grammar out;
    out.start = p.start;
    std::set<std::pair<std::string, std::vector<std::string>>> seen;
    std::vector<Rule> aliases;
    std::unordered_map<std::string, int> alias_seq;
    for (const auto& nt : lhs_order) {
        for (const auto& r : final_rules[nt]) {
            if (seen.insert({r.lhs, r.rhs}).second) {
                out.rules.push_back(r);
                continue;
            }
            if (r.rhs.size() == 1) continue; // merged terminal duplicate
            Rule patched = r;
            do {
                std::string alias = r.rhs[1] + "#d" + std::to_string(++alias_seq[r.rhs[1]]);
                patched.rhs[1] = alias;
            } while (!seen.insert({patched.lhs, patched.rhs}).second);
            out.rules.push_back(patched);
            for (const auto& sub : final_rules[r.rhs[1]])
                aliases.push_back({patched.rhs[1], sub.rhs});
        }
    }
    for (auto& r : aliases) out.rules.push_back(std::move(r));

    const std::size_t in_size = grammar_size(g);
    if (grammar_size(out) > in_size * in_size)
        throw Error(errc::cap_exceeded, "normal form exceeded the quadratic size bound");
    return out;
}

FiniteLanguage enumerate_language(const Grammar& g, const EnumLimits& limits) {
    Grammar p = prune_useless(g);
    assert_finite(p);
    auto by_lhs = rules_by_lhs(p);
    std::unordered_map<std::string, std::vector<std::string>> lang; // sorted shortlex

    for (const auto& nt : topological_nonterminals(p)) {
        auto it = by_lhs.find(nt);
        if (it == by_lhs.end()) continue;
        std::vector<std::string> acc;
        for (std::size_t ri : it->second) {
            const Rule& r = p.rules[ri];
            std::vector<std::string> partial{""};
            for (const auto& s : r.rhs) {
                const std::vector<std::string>* piece;
                std::vector<std::string> one;
                if (is_terminal(s)) {
                    one.push_back(s);
                    piece = &one;
                } else {
                    piece = &lang[s];
                }
                std::vector<std::string> next;
                next.reserve(partial.size() * piece->size());
                for (const auto& x : partial)
                    for (const auto& y : *piece) {
                        if (x.size() + y.size() > limits.max_word_length)
                            throw Error(errc::cap_exceeded,
                                        "word length above " + std::to_string(limits.max_word_length) +
                                            " while expanding " + nt);
                        next.push_back(x + y);
                    }
                if (next.size() > limits.max_words)
                    throw Error(errc::cap_exceeded, "more than " + std::to_string(limits.max_words) +
                                                        " words while expanding " + nt);
                partial = std::move(next);
            }
            acc.insert(acc.end(), partial.begin(), partial.end());
        }
        std::sort(acc.begin(), acc.end(), shortlex_less);
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        if (acc.size() > limits.max_words)
            throw Error(errc::cap_exceeded, "more than " + std::to_string(limits.max_words) +
                                                " words derivable from " + nt);
        lang[nt] = std::move(acc);
    }
    return make_language(lang[p.start]);
}

namespace {

void require_cnf(const Grammar& g) {
    for (const auto& r : g.rules) {
        bool ok = (r.rhs.size() == 1 && is_terminal(r.rhs[0])) ||
                  (r.rhs.size() == 2 && is_nonterminal(r.rhs[0]) && is_nonterminal(r.rhs[1]));
        if (!ok)
            throw Error(errc::bad_argument, "grammar is not in normal form at a rule for " + r.lhs);
    }
}

} // namespace

big_int count_parse_trees(const Grammar& cnf, const std::string& word) {
    require_cnf(cnf);
    const std::size_t n = word.size();
    if (n == 0) return 0;

    // Intern nonterminals.
    std::unordered_map<std::string, int> id;
    auto intern = [&](const std::string& s) {
        if (is_nonterminal(s) && !id.count(s)) { int k = (int)id.size(); id[s] = k; }
    };
    for (const auto& r : cnf.rules) {
        intern(r.lhs);
        for (const auto& s : r.rhs) intern(s);
    }
    if (!id.count(cnf.start)) return 0;
    const int nts = (int)id.size();

    // table[(len-1) * n + i] maps nonterminal id to tree count of word[i, i+len).
    std::vector<std::vector<big_int>> table(n * n, std::vector<big_int>());
    auto cell = [&](std::size_t i, std::size_t len) -> std::vector<big_int>& {
        auto& c = table[(len - 1) * n + i];
        if (c.empty()) c.assign(nts, 0);
        return c;
    };

    for (std::size_t i = 0; i < n; ++i) {
        auto& c = cell(i, 1);
        for (const auto& r : cnf.rules)
            if (r.rhs.size() == 1 && r.rhs[0][0] == word[i]) c[id[r.lhs]] += 1;
    }
    for (std::size_t len = 2; len <= n; ++len)
        for (std::size_t i = 0; i + len <= n; ++i) {
            auto& c = cell(i, len);
            for (const auto& r : cnf.rules) {
                if (r.rhs.size() != 2) continue;
                const int b = id[r.rhs[0]], cc = id[r.rhs[1]];
                big_int total = 0;
                for (std::size_t cut = 1; cut < len; ++cut) {
                    const auto& left = cell(i, cut);
                    const auto& right = cell(i + cut, len - cut);
                    if (left[b] != 0 && right[cc] != 0) total += left[b] * right[cc];
                }
                if (total != 0) c[id[r.lhs]] += total;
            }
        }
    return cell(0, n)[id[cnf.start]];
}

namespace {

// Tree counts for single-letter words come straight from the raw grammar:
// only unit chains and terminal rules can yield one letter, so this is path
// counting in an acyclic graph.
big_int count_single_letter(const Grammar& g, char c) {
    auto by_lhs = rules_by_lhs(g);
    std::unordered_map<std::string, big_int> memo;
    std::function<big_int(const std::string&)> cnt = [&](const std::string& nt) -> big_int {
        auto it = memo.find(nt);
        if (it != memo.end()) return it->second;
        big_int total = 0;
        auto rs = by_lhs.find(nt);
        if (rs != by_lhs.end())
            for (std::size_t ri : rs->second) {
                const Rule& r = g.rules[ri];
                if (r.rhs.size() != 1) continue;
                if (is_terminal(r.rhs[0])) total += (r.rhs[0][0] == c) ? 1 : 0;
                else total += cnt(r.rhs[0]);
            }
        memo[nt] = total;
        return total;
    };
    return cnt(g.start);
}

} // namespace

AmbiguityResult is_unambiguous(const Grammar& g, const EnumLimits& limits) {
    Grammar p = prune_useless(g);
    assert_finite(p);
    FiniteLanguage lang = enumerate_language(p, limits);
    Grammar cnf = to_cnf(p);

    AmbiguityResult res;
    for (const auto& w : lang.words) {
        big_int trees = (w.size() == 1) ? count_single_letter(p, w[0]) : count_parse_trees(cnf, w);
        if (trees > 1) {
            res.unambiguous = false;
            res.witness = w;
            res.witness_trees = trees;
            return res;
        }
    }
    return res;
}

std::map<std::string, std::size_t> nonterminal_lengths(const Grammar& g) {
    Grammar p = prune_useless(g);
    assert_finite(p);
    auto by_lhs = rules_by_lhs(p);
    std::map<std::string, std::size_t> len;
    for (const auto& nt : topological_nonterminals(p)) {
        auto it = by_lhs.find(nt);
        if (it == by_lhs.end()) continue;
        std::optional<std::size_t> mine;
        for (std::size_t ri : it->second) {
            std::size_t total = 0;
            for (const auto& s : p.rules[ri].rhs)
                total += is_terminal(s) ? 1 : len.at(s);
            if (mine && *mine != total)
                throw Error(errc::mixed_lengths, nt + " derives words of length " +
                                                     std::to_string(*mine) + " and " + std::to_string(total));
            mine = total;
        }
        len[nt] = *mine;
    }
    return len;
}

} // namespace fincfg
