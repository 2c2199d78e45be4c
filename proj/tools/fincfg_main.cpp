// Command-line front end: generate the shipped grammars and automata, check
// grammar files, extract and verify rectangle covers, run the counting and
// discrepancy verification suite, and print size series. All reports are
// deterministic: fixed key order, exact integers (big values as decimal
// strings), no timestamps.

#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fincfg/constructions.hpp"
#include "fincfg/discrepancy.hpp"
#include "fincfg/error.hpp"
#include "fincfg/grammar.hpp"
#include "fincfg/rectangles.hpp"
#include "fincfg/textio.hpp"

using json = nlohmann::ordered_json;

namespace {

int exit_code_for(fincfg::errc k) {
    switch (k) {
    case fincfg::errc::parse_error:
    case fincfg::errc::io_error:
    case fincfg::errc::bad_argument:
    case fincfg::errc::cap_exceeded:
    case fincfg::errc::not_divisible_by_4:
    case fincfg::errc::odd_length:
        return 2;
    default:
        return 1;  // analysis outcome: the input failed a check
    }
}

std::string dec(const fincfg::big_int& v) { return v.str(); }

void flatten(const json& j, const std::string& path,
             std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, path.empty() ? k : path + "." + k, rows);
    } else if (j.is_array()) {
        std::size_t i = 0;
        for (const auto& v : j) flatten(v, path + "[" + std::to_string(i++) + "]", rows);
    } else {
        std::string val = j.is_string() ? j.get<std::string>() : j.dump();
        for (char& c : val)
            if (c == ',' || c == '\n') c = ';';
        rows.emplace_back(path, val);
    }
}

std::string render(const json& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    std::string out = "key,value\n";
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    for (const auto& [k, v] : rows) out += k + "," + v + "\n";
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        fincfg::write_file(out_path, text);
}

int cmd_gen(const std::string& family, int n, bool allow_big, const std::string& out) {
    std::string text;
    if (family == "kmn")
        text = fincfg::print_grammar(fincfg::grammar_kmn(n));
    else if (family == "log")
        text = fincfg::print_grammar(fincfg::grammar_log(n));
    else if (family == "ucfg")
        text = fincfg::print_grammar(fincfg::grammar_unambiguous(n, allow_big));
    else if (family == "ucfg-paper")
        text = fincfg::print_grammar(fincfg::grammar_unambiguous_paper(n, allow_big));
    else
        text = fincfg::print_nfa(fincfg::nfa_guess_verify(n));
    emit(text, out);
    return 0;
}

int cmd_check(const std::string& in, std::size_t max_words, const std::string& format,
              const std::string& out) {
    fincfg::Grammar g = fincfg::parse_grammar(fincfg::read_file(in));
    json rep;
    rep["schemaVersion"] = 1;
    rep["command"] = "check";
    rep["size"] = fincfg::grammar_size(g);
    rep["rules"] = g.rules.size();
    std::set<std::string> nts;
    for (const fincfg::Rule& r : g.rules) {
        nts.insert(r.lhs);
        for (const std::string& s : r.rhs)
            if (fincfg::is_nonterminal(s)) nts.insert(s);
    }
    rep["nonterminals"] = nts.size();
    fincfg::Grammar pruned = fincfg::prune_useless(g);
    fincfg::assert_finite(pruned);
    rep["prunedSize"] = fincfg::grammar_size(pruned);
    rep["finite"] = true;
    fincfg::EnumLimits lim;
    lim.max_words = max_words;
    fincfg::FiniteLanguage lang = fincfg::enumerate_language(pruned, lim);
    rep["wordCount"] = lang.words.size();
    if (lang.uniform_length)
        rep["uniformLength"] = *lang.uniform_length;
    else
        rep["uniformLength"] = nullptr;
    json sample = json::array();
    for (std::size_t i = 0; i < lang.words.size() && i < 10; ++i) sample.push_back(lang.words[i]);
    rep["sampleWords"] = sample;
    fincfg::AmbiguityResult amb = fincfg::is_unambiguous(g, lim);
    rep["unambiguous"] = amb.unambiguous;
    if (!amb.unambiguous) {
        rep["ambiguityWitness"] = amb.witness;
        rep["witnessTrees"] = dec(amb.witness_trees);
    }
    emit(render(rep, format), out);
    return 0;
}

int cmd_decompose(const std::string& in, bool require_disjoint, std::size_t max_words,
                  const std::string& format, const std::string& out) {
    fincfg::Grammar g = fincfg::parse_grammar(fincfg::read_file(in));
    fincfg::EnumLimits lim;
    lim.max_words = max_words;
    fincfg::CoverResult cover = fincfg::extract_rectangle_cover(g, lim);
    fincfg::CoverReport rep = fincfg::verify_cover(cover, cover.language);
    json j;
    j["schemaVersion"] = 1;
    j["command"] = "decompose";
    j["wordLength"] = cover.word_length;
    j["cnfSize"] = cover.cnf_size;
    j["languageSize"] = cover.language.words.size();
    j["degenerate"] = cover.degenerate;
    json rows = json::array();
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const auto& e = rep.entries[i];
        json row;
        row["chosen"] = cover.chosen[i];
        row["n1"] = e.n1;
        row["n2"] = e.n2;
        row["n3"] = e.n3;
        row["contexts"] = e.contexts;
        row["middles"] = e.middles;
        row["denotationSize"] = e.denotation_size;
        row["balanced"] = e.balanced;
        rows.push_back(std::move(row));
    }
    j["rectangles"] = rows;
    j["rectangleCount"] = rep.rectangle_count;
    j["unionMatches"] = rep.union_matches;
    j["allBalanced"] = rep.all_balanced;
    j["disjoint"] = rep.disjoint;
    j["withinBound"] = rep.within_bound;
    j["failures"] = rep.failures;
    if (cover.word_length % 2 == 0 && cover.word_length >= 2 && cover.word_length <= 32) {
        json sv = json::array();
        for (const fincfg::Rectangle& r : cover.rectangles) {
            fincfg::SetRectangle sr = fincfg::rectangle_to_set_rectangle(r);
            json e;
            e["interval"] = json::array({sr.part.i, sr.part.j});
            e["side"] = sr.part.side;
            e["sSize"] = sr.S.size();
            e["tSize"] = sr.T.size();
            e["balanced"] = sr.part.balanced();
            sv.push_back(std::move(e));
        }
        j["setRectangles"] = sv;
    }
    bool ok = rep.ok(require_disjoint);
    j["ok"] = ok;
    emit(render(j, format), out);
    return ok ? 0 : 1;
}

json counting_json(const fincfg::CountingReport& c) {
    json out;
    json rows = json::array();
    for (const auto& r : c.rows) {
        json row;
        row["m"] = r.m;
        row["familySize"] = dec(r.family_size);
        row["aCount"] = dec(r.a_count);
        row["bCount"] = dec(r.b_count);
        row["bOutside"] = dec(r.b_outside);
        row["gap"] = dec(r.gap);
        row["aInside"] = r.a_inside;
        row["identitiesOk"] = r.identities_ok;
        rows.push_back(std::move(row));
    }
    out["rows"] = rows;
    json scan = json::array();
    for (const auto& s : c.scan) {
        json row;
        row["m"] = s.m;
        row["gap"] = dec(s.gap);
        row["holds"] = s.holds;
        scan.push_back(std::move(row));
    }
    out["scan"] = scan;
    out["firstHolds"] = c.first_holds;
    out["ok"] = c.ok;
    return out;
}

int cmd_verify_lemmas(int n, int samples, std::uint64_t seed, const std::string& format,
                      const std::string& out) {
    if (n < 4 || n > 12)
        throw fincfg::Error(fincfg::errc::bad_argument, "verify-lemmas: n must be between 4 and 12");
    int core = n - n % 4;
    json j;
    j["schemaVersion"] = 1;
    j["command"] = "verify-lemmas";
    j["n"] = n;
    j["coreN"] = core;
    j["samples"] = samples;
    j["seed"] = seed;

    fincfg::CountingReport c = fincfg::verify_counting_lemma(core);
    j["counting"] = counting_json(c);

    fincfg::RestrictedReport r = fincfg::check_restricted_bound(core, samples, seed);
    json jr;
    jr["samplesPerInterval"] = r.samples_per_interval;
    json rrows = json::array();
    for (const auto& row : r.rows) {
        json e;
        e["i"] = row.i;
        e["aligned"] = row.aligned;
        e["maxDisc"] = row.max_disc;
        e["cap"] = row.cap;
        e["violations"] = row.violations;
        rrows.push_back(std::move(e));
    }
    jr["rows"] = rrows;
    jr["alignedSamples"] = r.aligned_samples;
    jr["alignedMax"] = r.aligned_max;
    jr["unalignedMax"] = r.unaligned_max;
    jr["alignedOk"] = r.aligned_ok;
    jr["note"] =
        "the cap is asserted on block-aligned intervals only; unaligned maxima can exceed it and "
        "are reported without assertion";
    j["restricted"] = jr;

    fincfg::GeneralReport ge = fincfg::check_general_bound(core, samples, seed);
    json jg;
    jg["cap"] = dec(ge.cap);
    jg["maxDisc"] = ge.max_disc;
    jg["violations"] = ge.violations;
    jg["ok"] = ge.all_ok;
    j["general"] = jg;

    fincfg::NeatSplitAudit mn = fincfg::audit_make_neat(core, samples, seed);
    json jm;
    jm["maxPieces"] = mn.max_pieces;
    jm["ok"] = mn.all_ok;
    if (!mn.all_ok) jm["failure"] = mn.failure;
    j["makeNeat"] = jm;

    fincfg::GoodIndexAudit gi = fincfg::audit_good_indices(core);
    json jgi;
    jgi["neatChecked"] = gi.neat_checked;
    jgi["allChecked"] = gi.all_checked;
    jgi["ok"] = gi.ok;
    if (!gi.ok) jgi["failure"] = gi.failure;
    j["goodIndices"] = jgi;

    json cov;
    bool cover_ok = true;
    if (n == 4 || n == 5) {
        fincfg::Grammar g = fincfg::grammar_unambiguous(n);
        fincfg::CoverResult wc = fincfg::extract_rectangle_cover(g);
        std::vector<fincfg::SetRectangle> rs;
        for (const fincfg::Rectangle& wr : wc.rectangles)
            rs.push_back(fincfg::rectangle_to_set_rectangle(wr));
        cov["source"] = "ucfg";
        cov["sourceN"] = n;
        cov["ell"] = rs.size();
        if (n == 5) {
            fincfg::FourRestriction fr = fincfg::restrict_to_multiple_of_four(rs, 5);
            json jf;
            jf["oldN"] = fr.old_n;
            jf["newN"] = fr.new_n;
            jf["pieces"] = fr.pieces.size();
            jf["maxInflation"] = fr.max_inflation;
            jf["maxMoved"] = fr.max_moved;
            cov["restriction"] = jf;
            rs = fr.pieces;
        }
        fincfg::CoverBoundReport cb = fincfg::cover_lower_bound(rs, 4);
        cov["coreEll"] = cb.ell;
        cov["gap"] = dec(cb.gap);
        cov["telescoped"] = cb.telescoped;
        cov["telescopingOk"] = cb.telescoping_ok;
        cov["ellNeat"] = cb.ell_neat;
        cov["maxNeatInflation"] = cb.max_inflation;
        cov["minEllNeat"] = dec(cb.min_ell_neat);
        cov["minEll"] = dec(cb.min_ell);
        cov["boundOk"] = cb.bound_ok;
        cov["ok"] = cb.ok;
        cover_ok = cb.ok;
    } else {
        cov["skipped"] = "tractable unambiguous covers exist at n=4 and n=5 only";
    }
    j["cover"] = cov;

    bool ok = c.ok && c.first_holds == 4 && r.aligned_ok && ge.all_ok && mn.all_ok && gi.ok &&
              cover_ok;
    j["ok"] = ok;
    emit(render(j, format), out);
    return ok ? 0 : 1;
}

int cmd_report_series(int n_min, int n_max, const std::string& format, const std::string& out) {
    if (n_min < 1 || n_min > n_max || n_max > 10)
        throw fincfg::Error(fincfg::errc::bad_argument,
                            "report-series: need 1 <= n-min <= n-max <= 10");
    struct Row {
        int n;
        std::size_t log_size;
        std::string ucfg_size = "-", cover_l = "-", lower_bound = "-", ratio = "-", note = "-";
    };
    std::vector<Row> rows;
    for (int n = n_min; n <= n_max; ++n) {
        Row row;
        row.n = n;
        row.log_size = fincfg::grammar_size(fincfg::grammar_log(n));
        std::vector<std::string> notes;
        if (n <= 7) {
            fincfg::Grammar u = fincfg::grammar_unambiguous(n);
            row.ucfg_size = std::to_string(fincfg::grammar_size(u));
            if (n <= 5) {
                fincfg::CoverResult cover = fincfg::extract_rectangle_cover(u);
                row.cover_l = std::to_string(cover.rectangles.size());
                if (n == 4) {
                    std::vector<fincfg::SetRectangle> rs;
                    for (const fincfg::Rectangle& wr : cover.rectangles)
                        rs.push_back(fincfg::rectangle_to_set_rectangle(wr));
                    fincfg::CoverBoundReport cb = fincfg::cover_lower_bound(rs, 4);
                    row.lower_bound = dec(cb.min_ell);
                    row.ratio = std::to_string(cover.rectangles.size()) + "/" + dec(cb.min_ell);
                } else {
                    notes.push_back("lower bound needs n divisible by 4");
                }
            } else {
                notes.push_back("cover extraction capped at n=5");
            }
        } else {
            notes.push_back("ucfg construction capped at n=7");
        }
        if (!notes.empty()) {
            row.note.clear();
            for (std::size_t i = 0; i < notes.size(); ++i)
                row.note += (i ? "; " : "") + notes[i];
        }
        rows.push_back(std::move(row));
    }
    if (format == "csv") {
        std::string text = "n,logSize,ucfgSize,coverL,lowerBound,ratio,note\n";
        for (const Row& row : rows) {
            text += std::to_string(row.n) + "," + std::to_string(row.log_size) + "," +
                    row.ucfg_size + "," + row.cover_l + "," + row.lower_bound + "," + row.ratio +
                    "," + row.note + "\n";
        }
        emit(text, out);
        return 0;
    }
    json j;
    j["schemaVersion"] = 1;
    j["command"] = "report-series";
    json jrows = json::array();
    for (const Row& row : rows) {
        json e;
        e["n"] = row.n;
        e["logSize"] = row.log_size;
        e["ucfgSize"] = row.ucfg_size;
        e["coverL"] = row.cover_l;
        e["lowerBound"] = row.lower_bound;
        e["ratio"] = row.ratio;
        e["note"] = row.note;
        jrows.push_back(std::move(e));
    }
    j["rows"] = jrows;
    emit(j.dump(2) + "\n", out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-language grammar and rectangle-cover workbench"};
    app.require_subcommand(1);

    std::string family, in, out, format = "json";
    int n = 0, samples = 1000, n_min = 1, n_max = 6;
    std::uint64_t seed = 42;
    std::size_t max_words = std::size_t{1} << 24;
    bool allow_big = false, require_disjoint = false;

    CLI::App* gen = app.add_subcommand("gen", "write a generated grammar or automaton");
    gen->add_option("--family", family, "kmn | log | ucfg | ucfg-paper | nfa")
        ->required()
        ->check(CLI::IsMember({"kmn", "log", "ucfg", "ucfg-paper", "nfa"}));
    gen->add_option("--n", n, "family parameter (kmn takes its chain depth t)")->required();
    gen->add_flag("--allow-big", allow_big, "lift the size cap on ucfg generation");
    gen->add_option("--out", out, "output file (default stdout)");

    CLI::App* check = app.add_subcommand("check", "analyze a grammar file");
    check->add_option("--in", in, "grammar file")->required();
    check->add_option("--max-words", max_words, "enumeration cap (default 2^24)");
    check->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    check->add_option("--out", out, "output file (default stdout)");

    CLI::App* dec_cmd = app.add_subcommand("decompose", "extract and verify a rectangle cover");
    dec_cmd->add_option("--in", in, "grammar file")->required();
    dec_cmd->add_flag("--require-disjoint", require_disjoint,
                      "fail unless the rectangles are pairwise disjoint");
    dec_cmd->add_option("--max-words", max_words, "enumeration cap (default 2^24)");
    dec_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    dec_cmd->add_option("--out", out, "output file (default stdout)");

    CLI::App* verify = app.add_subcommand("verify-lemmas", "run the counting verification suite");
    verify->add_option("--n", n, "half-length, 4..12; reduced to a multiple of 4 when needed")
        ->required();
    verify->add_option("--samples", samples, "random rectangles per check (default 1000)");
    verify->add_option("--seed", seed, "base seed (default 42)");
    verify->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--out", out, "output file (default stdout)");

    CLI::App* series = app.add_subcommand("report-series", "size table across n");
    series->add_option("--n-min", n_min, "first n (default 1)");
    series->add_option("--n-max", n_max, "last n (default 6, at most 10)");
    series->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    series->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(family, n, allow_big, out);
        if (check->parsed()) return cmd_check(in, max_words, format, out);
        if (dec_cmd->parsed()) return cmd_decompose(in, require_disjoint, max_words, format, out);
        if (verify->parsed()) return cmd_verify_lemmas(n, samples, seed, format, out);
        if (series->parsed()) return cmd_report_series(n_min, n_max, format, out);
    } catch (const fincfg::Error& e) {
        std::cerr << "error: " << e.what() << "\n"; // what() carries the kind name
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
