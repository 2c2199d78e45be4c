#include "fincfg/constructions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace fincfg {

FiniteLanguage language_Ln(int n, int cap_n) {
    if (n < 1) throw Error(errc::bad_argument, "n must be >= 1");
    if (n > cap_n)
        throw Error(errc::cap_exceeded, "language_Ln(" + std::to_string(n) + ") above cap " +
                                            std::to_string(cap_n) + "; 2^(2n) candidates is too many");
    std::vector<std::string> words;
    const std::uint64_t total = std::uint64_t{1} << (2 * n);
    std::string w(2 * (std::size_t)n, 'b');
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        for (int i = 0; i < 2 * n; ++i) w[i] = (bits >> i & 1) ? 'a' : 'b';
        bool hit = false;
        for (int k = 0; k < n && !hit; ++k) hit = (w[k] == 'a' && w[k + n] == 'a');
        if (hit) words.push_back(w);
    }
    return make_language(std::move(words));
}

Grammar grammar_kmn(int t) {
    if (t < 1) throw Error(errc::bad_argument, "t must be >= 1");
    auto A = [](int i) { return "A" + std::to_string(i); };
    auto B = [](int i) { return "B" + std::to_string(i); };
    std::vector<Rule> rules;
    for (int i = t; i >= 1; --i) {
        rules.push_back({A(i), {B(i - 1), A(i - 1)}});
        rules.push_back({A(i), {A(i - 1), B(i - 1)}});
    }
    rules.push_back({A(0), {B(0), "a", B(t), "a"}});
    rules.push_back({A(0), {"a", B(t), "a", B(0)}});
    for (int i = t; i >= 1; --i) rules.push_back({B(i), {B(i - 1), B(i - 1)}});
    rules.push_back({B(0), {"a"}});
    rules.push_back({B(0), {"b"}});
    return make_grammar(std::move(rules), A(t));
}

Grammar grammar_log(int n) {
    if (n < 1) throw Error(errc::bad_argument, "n must be >= 1");
    if (n == 1) return make_grammar({{"S", {"a", "a"}}}, "S");

    auto A = [](int i) { return "A" + std::to_string(i); };
    auto B = [](int i) { return "B" + std::to_string(i); };
    int levels = 1; // B<i>, A<i> exist for 2^i < n
    while ((1 << levels) < n) ++levels;

    // Binary digits of n-1, largest first: the block sizes of the free part.
    std::vector<int> blocks;
    for (int i = levels - 1; i >= 0; --i)
        if ((n - 1) >> i & 1) blocks.push_back(i);

    std::vector<Rule> rules;

    // Balanced tree over the blocks. C nodes contain the insertion, D nodes
    // are fully free. Node names carry the covered block range.
    std::function<std::string(int, int)> build = [&](int lo, int hi) { // [lo, hi)
        std::string v = std::to_string(lo) + "_" + std::to_string(hi);
        if (hi - lo == 1) {
            rules.push_back({"C" + v, {A(blocks[lo])}});
            rules.push_back({"D" + v, {B(blocks[lo])}});
            return v;
        }
        int mid = (lo + hi + 1) / 2;
        std::string u = build(lo, mid), w = build(mid, hi);
        rules.push_back({"C" + v, {"C" + u, "D" + w}});
        rules.push_back({"C" + v, {"D" + u, "C" + w}});
        rules.push_back({"D" + v, {"D" + u, "D" + w}});
        return v;
    };
    std::string root = build(0, (int)blocks.size());

    for (int i = levels - 1; i >= 1; --i) {
        rules.push_back({A(i), {B(i - 1), A(i - 1)}});
        rules.push_back({A(i), {A(i - 1), B(i - 1)}});
    }
    rules.push_back({A(0), {B(0), "a", "S", "a"}});
    rules.push_back({A(0), {"a", "S", "a", B(0)}});

    Rule s{"S", {}};
    for (int i : blocks) s.rhs.push_back(B(i));
    rules.push_back(std::move(s));

    for (int i = levels - 1; i >= 1; --i) rules.push_back({B(i), {B(i - 1), B(i - 1)}});
    rules.push_back({B(0), {"a"}});
    rules.push_back({B(0), {"b"}});

    // The root never appears as a free block, so its D rule is dead weight.
    std::string start = "C" + root;
    Grammar g = make_grammar(std::move(rules), start);
    return prune_useless(g);
}

namespace {

Grammar unambiguous_family(int n, bool all_pairs, bool allow_big, int cap_n) {
    if (n < 1) throw Error(errc::bad_argument, "n must be >= 1");
    if (n > cap_n && !allow_big)
        throw Error(errc::cap_exceeded, "n=" + std::to_string(n) + " above cap " + std::to_string(cap_n) +
                                            "; the rule count grows like 3^n (pass allow_big to override)");
    auto A = [](int i) { return "A" + std::to_string(i); };
    auto C = [](int i) { return "C" + std::to_string(i); };
    auto lit = [](const std::string& w) {
        std::string name = "W";
        for (char c : w) name += (char)(c - 'a' + 'A');
        return name;
    };

    std::vector<Rule> rules;
    std::set<std::string> lits;
    for (int i = 1; i <= n; ++i) rules.push_back({"S", {A(i)}});

    // Words of length k over {a, b} in lexicographic order.
    auto words_of = [](int k) {
        std::vector<std::string> out;
        out.reserve(std::size_t{1} << k);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << k); ++bits) {
            std::string w(k, 'a');
            for (int p = 0; p < k; ++p)
                if (bits >> (k - 1 - p) & 1) w[p] = 'b';
            out.push_back(w);
        }
        return out;
    };

    for (int i = 1; i <= n; ++i) {
        std::vector<std::pair<std::string, std::string>> pairs;
        if (i == 1) {
            pairs.push_back({"", ""});
        } else {
            auto prefixes = words_of(i - 1);
            for (const auto& w : prefixes) {
                if (all_pairs) {
                    // Every partner with no position where both carry 'a':
                    // anything else would move the first matched pair left.
                    for (const auto& u : prefixes) {
                        bool clash = false;
                        for (int k = 0; k < i - 1 && !clash; ++k)
                            clash = (w[k] == 'a' && u[k] == 'a');
                        if (!clash) pairs.push_back({w, u});
                    }
                } else {
                    std::string u = w;
                    for (char& c : u) c = (c == 'a') ? 'b' : 'a';
                    pairs.push_back({w, u});
                }
            }
        }
        for (const auto& [w, u] : pairs) {
            Rule r{A(i), {}};
            if (!w.empty()) { r.rhs.push_back(lit(w)); lits.insert(w); }
            r.rhs.push_back("a");
            if (i < n) r.rhs.push_back(C(n - i));
            if (!u.empty()) { r.rhs.push_back(lit(u)); lits.insert(u); }
            r.rhs.push_back("a");
            if (i < n) r.rhs.push_back(C(n - i));
            rules.push_back(std::move(r));
        }
    }

    if (n >= 2) {
        for (int i = n - 1; i >= 2; --i) {
            rules.push_back({C(i), {"a", C(i - 1)}});
            rules.push_back({C(i), {"b", C(i - 1)}});
        }
        rules.push_back({C(1), {"a"}});
        rules.push_back({C(1), {"b"}});
    }
    for (const auto& w : lits) {
        Rule r{lit(w), {}};
        for (char c : w) r.rhs.push_back(std::string(1, c));
        rules.push_back(std::move(r));
    }
    return make_grammar(std::move(rules), "S");
}

} // namespace

Grammar grammar_unambiguous(int n, bool allow_big, int cap_n) {
    return unambiguous_family(n, true, allow_big, cap_n);
}

Grammar grammar_unambiguous_paper(int n, bool allow_big, int cap_n) {
    return unambiguous_family(n, false, allow_big, cap_n);
}

Nfa nfa_guess_verify(int n) {
    if (n < 1) throw Error(errc::bad_argument, "n must be >= 1");

    // A chain state is (position p, set of future forced-'a' offsets). Two
    // states accept the same residual language exactly when the remaining
    // length and forced offsets agree, so that signature is the state.
    using Sig = std::pair<int, std::vector<int>>; // (remaining, sorted offsets)
    std::map<Sig, std::string> name;
    std::vector<Sig> order;
    auto state_of = [&](const Sig& s) {
        auto it = name.find(s);
        if (it != name.end()) return it->second;
        std::string q = "q" + std::to_string(name.size());
        name[s] = q;
        order.push_back(s);
        return q;
    };

    Nfa nfa;
    std::set<std::tuple<std::string, char, std::string>> seen_tr;
    std::set<std::string> seen_init;

    for (int k = 0; k < n; ++k) {
        // Guess: matched pair at positions k+1 and k+n+1 (0-based k, k+n).
        for (int p = 0; p <= 2 * n; ++p) {
            std::vector<int> forced;
            if (k >= p) forced.push_back(k - p);
            if (k + n >= p) forced.push_back(k + n - p);
            Sig here{2 * n - p, forced};
            std::string q = state_of(here);
            if (p == 0 && seen_init.insert(q).second) nfa.initial.push_back(q);
            if (p == 2 * n) continue;
            for (char c : {'a', 'b'}) {
                if (!forced.empty() && forced.front() == 0 && c != 'a') continue;
                std::vector<int> next_forced;
                if (k >= p + 1) next_forced.push_back(k - p - 1);
                if (k + n >= p + 1) next_forced.push_back(k + n - p - 1);
                Sig next{2 * n - p - 1, next_forced};
                auto tr = std::make_tuple(q, c, state_of(next));
                if (seen_tr.insert(tr).second) nfa.transitions.push_back(tr);
            }
        }
    }
    for (const auto& s : order) {
        nfa.states.push_back(name[s]);
        if (s.first == 0) nfa.accepting.push_back(name[s]);
    }
    return nfa;
}

bool nfa_accepts(const Nfa& nfa, const std::string& word) {
    std::set<std::string> cur(nfa.initial.begin(), nfa.initial.end());
    for (char c : word) {
        std::set<std::string> next;
        for (const auto& [from, letter, to] : nfa.transitions)
            if (letter == c && cur.count(from)) next.insert(to);
        cur = std::move(next);
        if (cur.empty()) return false;
    }
    for (const auto& q : nfa.accepting)
        if (cur.count(q)) return true;
    return false;
}

} // namespace fincfg
