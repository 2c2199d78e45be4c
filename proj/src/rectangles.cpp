#include "fincfg/rectangles.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace fincfg {

bool Rectangle::balanced() const {
    const std::size_t N = word_length();
    return 3 * n2 >= N && 3 * n2 <= 2 * N;
}

std::vector<std::string> Rectangle::denotation() const {
    std::vector<std::string> out;
    out.reserve(contexts.size() * middles.words.size());
    for (const auto& [pre, suf] : contexts)
        for (const auto& mid : middles.words) out.push_back(pre + mid + suf);
    std::sort(out.begin(), out.end(), shortlex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::string positioned_name(const std::string& base, std::size_t pos) {
    return base + "@" + std::to_string(pos);
}

} // namespace

PositionedGrammar position_index(const Grammar& cnf) {
    for (const auto& r : cnf.rules) {
        bool ok = (r.rhs.size() == 1 && is_terminal(r.rhs[0])) ||
                  (r.rhs.size() == 2 && is_nonterminal(r.rhs[0]) && is_nonterminal(r.rhs[1]));
        if (!ok) throw Error(errc::bad_argument, "position_index expects a normal-form grammar");
    }
    auto lens = nonterminal_lengths(cnf);
    Grammar p = prune_useless(cnf);

    std::unordered_map<std::string, std::vector<const Rule*>> by_lhs;
    for (const auto& r : p.rules) by_lhs[r.lhs].push_back(&r);

    PositionedGrammar pg;
    pg.word_length = lens.at(p.start);

    std::vector<std::pair<std::string, std::size_t>> queue{{p.start, 1}};
    std::unordered_set<std::string> seen{positioned_name(p.start, 1)};
    // Breadth-first discovery keeps naming and rule order deterministic.
    for (std::size_t q = 0; q < queue.size(); ++q) {
        auto [base, pos] = queue[q];
        std::string name = positioned_name(base, pos);
        pg.origin[name] = {base, pos};
        pg.width[name] = lens.at(base);
        for (const Rule* r : by_lhs.at(base)) {
            if (r->rhs.size() == 1) {
                pg.g.rules.push_back({name, {r->rhs[0]}});
                continue;
            }
            std::size_t cut = lens.at(r->rhs[0]);
            std::string left = positioned_name(r->rhs[0], pos);
            std::string right = positioned_name(r->rhs[1], pos + cut);
            pg.g.rules.push_back({name, {left, right}});
            if (seen.insert(left).second) queue.push_back({r->rhs[0], pos});
            if (seen.insert(right).second) queue.push_back({r->rhs[1], pos + cut});
        }
    }
    pg.g.start = positioned_name(p.start, 1);
    return pg;
}

ParseTree canonical_parse_tree(const PositionedGrammar& pg, const std::string& word) {
    if (word.size() != pg.word_length)
        throw Error(errc::bad_argument, "word length does not match the grammar");

    std::unordered_map<std::string, std::vector<const Rule*>> by_lhs;
    for (const auto& r : pg.g.rules) by_lhs[r.lhs].push_back(&r);

    // Membership of the fixed word's slice, per positioned nonterminal.
    std::unordered_map<std::string, bool> derives;
    std::function<bool(const std::string&)> check = [&](const std::string& nt) -> bool {
        auto it = derives.find(nt);
        if (it != derives.end()) return it->second;
        derives[nt] = false; // no cycles in a finite grammar; this is a guard
        bool ok = false;
        auto rs = by_lhs.find(nt);
        if (rs != by_lhs.end())
            for (const Rule* r : rs->second) {
                if (r->rhs.size() == 1) {
                    std::size_t pos = pg.origin.at(nt).second;
                    ok = (word[pos - 1] == r->rhs[0][0]);
                } else {
                    ok = check(r->rhs[0]) && check(r->rhs[1]);
                }
                if (ok) break;
            }
        derives[nt] = ok;
        return ok;
    };

    std::function<ParseTree(const std::string&)> build = [&](const std::string& nt) -> ParseTree {
        ParseTree node{nt, {}};
        for (const Rule* r : by_lhs.at(nt)) {
            if (r->rhs.size() == 1) {
                std::size_t pos = pg.origin.at(nt).second;
                if (word[pos - 1] == r->rhs[0][0]) {
                    node.children.push_back({r->rhs[0], {}});
                    return node;
                }
            } else if (check(r->rhs[0]) && check(r->rhs[1])) {
                node.children.push_back(build(r->rhs[0]));
                node.children.push_back(build(r->rhs[1]));
                return node;
            }
        }
        throw Error(errc::bad_argument, "word is not derivable (stuck at " + nt + ")");
    };
    if (!check(pg.g.start))
        throw Error(errc::bad_argument, "word is not in the language");
    return build(pg.g.start);
}

std::pair<std::string, std::size_t> find_balanced_nonterminal(const PositionedGrammar& pg,
                                                              const ParseTree& tree) {
    const std::size_t N = pg.word_length;
    if (N < 3) throw Error(errc::bad_argument, "word length must be at least 3");

    const ParseTree* node = &tree;
    std::size_t leaves = node->leaf_count();
    // Stop strictly below 2N/3; the parent had at least 2N/3, so taking the
    // heavier child keeps at least half of that.
    while (3 * leaves >= 2 * N) {
        const ParseTree* next = nullptr;
        std::size_t best = 0;
        for (const auto& c : node->children) {
            if (c.children.empty()) continue; // terminal leaf
            std::size_t lc = c.leaf_count();
            if (lc > best) { best = lc; next = &c; } // left wins ties
        }
        if (!next) break; // single terminal below; cannot happen for N >= 3
        node = next;
        leaves = best;
    }
    return {node->symbol, leaves};
}

namespace {

// Words derivable from every positioned nonterminal, bottom up.
std::unordered_map<std::string, std::vector<std::string>> pure_languages(const PositionedGrammar& pg) {
    std::unordered_map<std::string, std::vector<const Rule*>> by_lhs;
    for (const auto& r : pg.g.rules) by_lhs[r.lhs].push_back(&r);
    std::unordered_map<std::string, std::vector<std::string>> pure;

    for (const auto& nt : topological_nonterminals(pg.g)) {
        auto rs = by_lhs.find(nt);
        if (rs == by_lhs.end()) continue;
        std::vector<std::string> acc;
        for (const Rule* r : rs->second) {
            if (r->rhs.size() == 1) {
                acc.push_back(r->rhs[0]);
            } else {
                for (const auto& x : pure[r->rhs[0]])
                    for (const auto& y : pure[r->rhs[1]]) acc.push_back(x + y);
            }
        }
        std::sort(acc.begin(), acc.end(), shortlex_less);
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        pure[nt] = std::move(acc);
    }
    return pure;
}

} // namespace

Rectangle rectangle_of_nonterminal(const PositionedGrammar& pg, const std::string& positioned_nt) {
    auto org = pg.origin.find(positioned_nt);
    if (org == pg.origin.end())
        throw Error(errc::bad_argument, "unknown positioned nonterminal " + positioned_nt);

    auto pure = pure_languages(pg);
    const std::size_t N = pg.word_length;
    const std::size_t n2 = pg.width.at(positioned_nt);
    const std::size_t n1 = org->second.second - 1;

    // Context pairs: derivations of the start with the chosen nonterminal
    // left as a hole. Built bottom up like the languages themselves.
    std::unordered_map<std::string, std::vector<const Rule*>> by_lhs;
    for (const auto& r : pg.g.rules) by_lhs[r.lhs].push_back(&r);
    std::unordered_map<std::string, std::vector<std::pair<std::string, std::string>>> holed;
    holed[positioned_nt] = {{"", ""}};

    for (const auto& nt : topological_nonterminals(pg.g)) {
        auto rs = by_lhs.find(nt);
        if (rs == by_lhs.end()) continue;
        auto& mine = holed[nt]; // keeps the seed for the hole itself
        for (const Rule* r : rs->second) {
            if (r->rhs.size() != 2) continue;
            if (nt == positioned_nt) continue; // the hole swallows the whole slice
            auto lh = holed.find(r->rhs[0]);
            if (lh != holed.end())
                for (const auto& [pre, suf] : lh->second)
                    for (const auto& y : pure[r->rhs[1]]) mine.push_back({pre, suf + y});
            auto rh = holed.find(r->rhs[1]);
            if (rh != holed.end())
                for (const auto& [pre, suf] : rh->second)
                    for (const auto& x : pure[r->rhs[0]]) mine.push_back({x + pre, suf});
        }
        if (!mine.empty()) {
            std::sort(mine.begin(), mine.end());
            mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
        } else {
            holed.erase(nt);
        }
    }

    Rectangle rect;
    rect.n1 = n1;
    rect.n2 = n2;
    rect.n3 = N - n1 - n2;
    rect.middles = make_language(pure[positioned_nt]);
    auto ctx = holed.find(pg.g.start);
    if (ctx != holed.end()) rect.contexts = ctx->second;
    for (const auto& [pre, suf] : rect.contexts)
        if (pre.size() != rect.n1 || suf.size() != rect.n3)
            throw Error(errc::bad_argument, "context widths disagree with the position index");
    return rect;
}

CoverResult extract_rectangle_cover(const Grammar& g, const EnumLimits& limits) {
    Grammar pruned = prune_useless(g);
    assert_finite(pruned);
    Grammar cnf = to_cnf(pruned);
    auto lens = nonterminal_lengths(cnf); // also proves uniform length

    CoverResult out;
    out.word_length = lens.at(cnf.start);
    out.cnf_size = grammar_size(cnf);
    out.language = enumerate_language(pruned, limits);

    if (out.word_length < 3) {
        // Too short for the one-third split; one rectangle per word.
        out.degenerate = true;
        for (const auto& w : out.language.words) {
            Rectangle r;
            r.contexts = {{"", ""}};
            r.middles = make_language({w});
            r.n1 = 0;
            r.n2 = w.size();
            r.n3 = 0;
            r.degenerate = true;
            out.rectangles.push_back(std::move(r));
            out.chosen.push_back("");
        }
        return out;
    }

    PositionedGrammar pg = position_index(cnf);
    FiniteLanguage lang = enumerate_language(pg.g, limits);
    while (!lang.words.empty()) {
        const std::string& w = lang.words.front(); // smallest remaining word
        ParseTree tree = canonical_parse_tree(pg, w);
        auto [nt, leaves] = find_balanced_nonterminal(pg, tree);
        (void)leaves;
        out.rectangles.push_back(rectangle_of_nonterminal(pg, nt));
        out.chosen.push_back(nt);

        std::erase_if(pg.g.rules, [&](const Rule& r) { return r.lhs == nt; });
        try {
            pg.g = prune_useless(pg.g);
        } catch (const Error& e) {
            if (e.kind() != errc::empty_language) throw;
            break;
        }
        lang = enumerate_language(pg.g, limits);
    }
    return out;
}

CoverReport verify_cover(const CoverResult& cover, const FiniteLanguage& expected) {
    CoverReport rep;
    rep.rectangle_count = cover.rectangles.size();

    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<std::string> all;
    bool balanced_ok = true, disjoint_ok = true;

    for (std::size_t k = 0; k < cover.rectangles.size(); ++k) {
        const Rectangle& r = cover.rectangles[k];
        auto den = r.denotation();
        bool bal = r.degenerate || r.balanced();
        if (!bal) {
            balanced_ok = false;
            rep.failures.push_back("rectangle " + std::to_string(k) + " is unbalanced (n2=" +
                                   std::to_string(r.n2) + " of " + std::to_string(r.word_length()) + ")");
        }
        for (const auto& w : den) {
            auto [it, fresh] = first_seen.try_emplace(w, k);
            if (!fresh && disjoint_ok) {
                disjoint_ok = false;
                rep.failures.push_back("word " + w + " lies in rectangles " +
                                       std::to_string(it->second) + " and " + std::to_string(k));
            }
            all.push_back(w);
        }
        rep.entries.push_back({r.n1, r.n2, r.n3, r.contexts.size(), r.middles.words.size(),
                               den.size(), bal});
    }

    std::sort(all.begin(), all.end(), shortlex_less);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    rep.union_matches = (all == expected.words);
    if (!rep.union_matches) {
        for (const auto& w : expected.words)
            if (!std::binary_search(all.begin(), all.end(), w, shortlex_less)) {
                rep.failures.push_back("word " + w + " is not covered");
                break;
            }
        for (const auto& w : all)
            if (!expected.contains(w)) {
                rep.failures.push_back("word " + w + " is covered but not in the language");
                break;
            }
    }
    rep.all_balanced = balanced_ok;
    rep.disjoint = disjoint_ok;
    // cnf_size 0 marks a bare rectangle list with no grammar behind it; the
    // size bound only makes sense against an actual grammar.
    rep.within_bound = cover.cnf_size == 0 ||
                       cover.rectangles.size() <= cover.word_length * cover.cnf_size;
    if (!rep.within_bound)
        rep.failures.push_back("cover has " + std::to_string(cover.rectangles.size()) +
                               " rectangles, above N * cnf_size");
    return rep;
}

SetWord word_to_sets(const std::string& w) {
    if (w.size() % 2 != 0)
        throw Error(errc::odd_length, "set view needs even length, got " + std::to_string(w.size()));
    if (w.size() > 32)
        throw Error(errc::cap_exceeded, "set view supports length up to 32");
    SetWord s;
    s.n = (int)w.size() / 2;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 'a') s.bits |= (1u << k);
        else if (w[k] != 'b')
            throw Error(errc::bad_argument, "set view needs the alphabet {a, b}");
    }
    return s;
}

std::string sets_to_word(const SetWord& s) {
    std::string w(2 * (std::size_t)s.n, 'b');
    for (int k = 0; k < 2 * s.n; ++k)
        if (s.bits >> k & 1) w[k] = 'a';
    return w;
}

std::uint32_t OrderedPartition::interval_mask() const {
    std::uint32_t m = 0;
    for (int p = i; p <= j; ++p) m |= (1u << (p - 1));
    return m;
}

std::uint32_t OrderedPartition::part_mask(int part) const {
    std::uint32_t iv = interval_mask();
    return (part == side) ? iv : (universe_mask() & ~iv);
}

int OrderedPartition::part_size(int part) const {
    return __builtin_popcount(part_mask(part));
}

bool OrderedPartition::balanced() const {
    for (int part : {0, 1}) {
        int sz = part_size(part);
        if (3 * sz < 2 * n || 3 * sz > 4 * n) return false;
    }
    return true;
}

std::vector<std::uint32_t> SetRectangle::denotation() const {
    std::vector<std::uint32_t> out;
    out.reserve(S.size() * T.size());
    for (auto u : S)
        for (auto v : T) out.push_back(u | v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SetRectangle rectangle_to_set_rectangle(const Rectangle& r) {
    const std::size_t N = r.word_length();
    if (N % 2 != 0)
        throw Error(errc::odd_length, "set view needs even word length, got " + std::to_string(N));

    SetRectangle sr;
    sr.part.n = (int)N / 2;
    sr.part.i = (int)r.n1 + 1;
    sr.part.j = (int)(r.n1 + r.n2);
    sr.part.side = 1;

    std::string mid_blank((std::size_t)r.n2, 'b');
    for (const auto& [pre, suf] : r.contexts)
        sr.S.push_back(word_to_sets(pre + mid_blank + suf).bits);
    std::string pre_blank((std::size_t)r.n1, 'b'), suf_blank((std::size_t)r.n3, 'b');
    for (const auto& mid : r.middles.words)
        sr.T.push_back(word_to_sets(pre_blank + mid + suf_blank).bits);

    std::sort(sr.S.begin(), sr.S.end());
    sr.S.erase(std::unique(sr.S.begin(), sr.S.end()), sr.S.end());
    std::sort(sr.T.begin(), sr.T.end());
    sr.T.erase(std::unique(sr.T.begin(), sr.T.end()), sr.T.end());
    return sr;
}

} // namespace fincfg
