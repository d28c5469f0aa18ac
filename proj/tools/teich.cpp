// Batch front end: build holonomy representations from pants data, compute
// boundary maps at infinity, apply mapping classes, and run convergence
// reports. Exit codes: 0 ok, 2 bad input, 3 type mismatch, 4 monotonicity
// violation, 5 invalid automorphism.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "teich/circle_map.hpp"
#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/io.hpp"
#include "teich/marked.hpp"
#include "teich/mcg.hpp"
#include "teich/moebius.hpp"
#include "teich/pants.hpp"

namespace fs = std::filesystem;
using namespace teich;

namespace {

int exit_code_for(const error& e) {
    switch (e.code()) {
        case errc::type_mismatch:
        case errc::elliptic_found:
            return 3;
        case errc::monotonicity_violation:
            return 4;
        case errc::invalid_automorphism:
            return 5;
        default:
            return 2;
    }
}

struct Options {
    int depth = 6;
    double tol = 1e-6;
    std::string anchors;
    unsigned seed = 0;  // all diagnostics are deterministic; kept for interface stability
    std::string out = ".";
    bool svg = false;
};

fs::path ensure_out_dir(const Options& opt) {
    fs::path dir(opt.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::exists(dir)) fail(errc::io_error, "cannot create output directory " + opt.out);
    return dir;
}

// Anchor words are comma-separated; letters inside one word may be
// space-separated ("A B'") or juxtaposed single-letter names ("AB'").
std::array<Word, 3> resolve_anchors(const Options& opt, const GroupRepresentation& reference) {
    if (opt.anchors.empty()) return default_anchors(reference);
    std::vector<Word> words;
    std::string token;
    std::stringstream ss(opt.anchors);
    while (std::getline(ss, token, ',')) {
        if (token.find(' ') == std::string::npos) {
            std::string spaced;
            for (char ch : token) {
                if (!spaced.empty() && ch != '\'') spaced += ' ';
                spaced += ch;
            }
            token = spaced;
        }
        words.push_back(reference.parse(token));
    }
    if (words.size() != 3) fail(errc::parse_error, "--anchors needs exactly three words");
    return {words[0], words[1], words[2]};
}

int cmd_build(const std::string& pants_file, const Options& opt) {
    PantsDecomposition pd = load_pants(pants_file);
    GroupRepresentation rep = build_representation(pd);
    fs::path dir = ensure_out_dir(opt);
    fs::path out = dir / (fs::path(pants_file).stem().string() + "_rep.json");
    save_representation(out, rep);

    std::printf("generators: %d  relators: %zu  cusps: %zu\n", rep.rank(), rep.relators.size(),
                rep.peripheral_words.size());
    std::printf("%-18s %10s %14s %14s %10s\n", "cuff", "length", "|trace|", "2cosh(l/2)", "defect");
    for (size_t i = 0; i < rep.twist_marks.size(); ++i) {
        const auto& mark = rep.twist_marks[i];
        double len = pd.pants[pd.gluings[i].from_pants][pd.gluings[i].from_slot].length;
        double tr = std::abs(evaluate_word(rep, mark.cuff).trace());
        double want = 2.0 * std::cosh(len / 2.0);
        std::printf("%-18s %10.6f %14.9f %14.9f %10.2e\n", rep.format(mark.cuff).c_str(), len, tr,
                    want, std::abs(tr - want));
    }
    for (const Word& p : rep.peripheral_words) {
        Moebius m = evaluate_word(rep, p);
        std::printf("cusp %-13s trace %+.12f (%s)\n", rep.format(p).c_str(), m.trace(),
                    element_class_name(m.classify(opt.tol)));
    }
    std::printf("wrote %s\n", out.string().c_str());
    return 0;
}

int cmd_bmap(const std::string& ref_file, const std::string& target_file, const Options& opt) {
    GroupRepresentation ref = load_representation(ref_file);
    GroupRepresentation target = load_representation(target_file);
    BallOptions ball;
    ball.classify_tol = opt.tol;
    std::vector<Word> words = ball_words(ref.rank(), opt.depth, ball);
    SampledCircleMap map = from_representations(ref, target, words, opt.tol);

    std::vector<Word> testers;
    for (int g = 0; g < ref.rank(); ++g) testers.push_back(Word::generator(g));
    double defect_exact = check_equivariance(map, ref, target, testers,
                                             EquivarianceMode::ExactRows);
    double defect_interp = check_equivariance(map, ref, target, testers,
                                              EquivarianceMode::Interpolated);

    std::printf("samples: %zu\n", map.size());
    std::printf("monotonicity: PASS\n");
    std::printf("max_gap: %.6f rad\n", map.max_sample_gap());
    std::printf("equivariance defect (sink rows): %.3e\n", defect_exact);
    std::printf("equivariance defect (interpolated): %.3e\n", defect_interp);

    fs::path dir = ensure_out_dir(opt);
    fs::path csv = dir / "bmap.csv";
    write_bmap_csv(csv, map, ref);
    std::printf("wrote %s\n", csv.string().c_str());
    if (opt.svg) {
        fs::path svg = dir / "bmap.svg";
        write_bmap_svg(svg, map);
        std::printf("wrote %s\n", svg.string().c_str());
    }
    return 0;
}

int cmd_converge(const std::string& manifest_file, const std::string& limit_file,
                 const Options& opt) {
    std::vector<fs::path> paths = load_manifest(manifest_file);
    std::vector<MarkedStructure> sequence;
    for (const fs::path& p : paths) sequence.push_back(load_marked(p));
    MarkedStructure limit = load_marked(limit_file);
    std::array<Word, 3> anchors = resolve_anchors(opt, limit.reference);

    BallOptions ball;
    ball.classify_tol = opt.tol;
    std::vector<ConvergenceRow> rows = converge_report(sequence, limit, opt.depth, anchors, ball);

    std::printf("%4s %16s %16s\n", "i", "char_dist", "bmap_dist");
    for (const ConvergenceRow& r : rows)
        std::printf("%4d %16.9e %16.9e\n", r.index, r.char_dist, r.bmap_dist);

    fs::path dir = ensure_out_dir(opt);
    fs::path csv = dir / "converge.csv";
    write_converge_csv(csv, rows);
    std::printf("wrote %s\n", csv.string().c_str());
    return 0;
}

int cmd_act(const std::string& ms_file, const std::string& mc_file, const Options& opt) {
    MarkedStructure ms = load_marked(ms_file);
    MappingClass mc = load_mapping_class(mc_file, ms.reference);
    MarkedStructure acted = act(ms, mc);

    BallOptions ball;
    ball.classify_tol = opt.tol;
    double defect = verify_action_formula(ms, mc, opt.depth, ball);
    std::printf("action formula defect at depth %d: %.6e\n", opt.depth, defect);

    fs::path dir = ensure_out_dir(opt);
    fs::path out = dir / "acted_rep.json";
    save_representation(out, acted.target);
    std::printf("wrote %s\n", out.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"marked hyperbolic structures at the boundary circle"};
    app.require_subcommand(1);

    Options opt;
    std::string pants_file, ref_file, target_file, manifest_file, limit_file, ms_file, mc_file;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--depth", opt.depth, "word-ball depth L")->check(CLI::Range(1, 12));
        cmd->add_option("--tol", opt.tol, "classification tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opt.seed, "seed for randomized diagnostics");
        cmd->add_option("--out", opt.out, "output directory");
    };

    CLI::App* build = app.add_subcommand("build", "holonomy representation from a pants file");
    build->add_option("pants", pants_file)->required();
    add_common(build);

    CLI::App* bmap = app.add_subcommand("bmap", "boundary map between two representations");
    bmap->add_option("reference", ref_file)->required();
    bmap->add_option("target", target_file)->required();
    bmap->add_flag("--svg", opt.svg, "also write an SVG rendering");
    add_common(bmap);

    CLI::App* converge = app.add_subcommand("converge", "co-convergence report for a sequence");
    converge->add_option("manifest", manifest_file)->required();
    converge->add_option("limit", limit_file)->required();
    converge->add_option("--anchors", opt.anchors, "three comma-separated anchor words");
    add_common(converge);

    CLI::App* actc = app.add_subcommand("act", "apply a mapping class to a marked structure");
    actc->add_option("structure", ms_file)->required();
    actc->add_option("mapping_class", mc_file)->required();
    add_common(actc);

    try {
        app.parse(argc, argv);
        if (build->parsed()) return cmd_build(pants_file, opt);
        if (bmap->parsed()) return cmd_bmap(ref_file, target_file, opt);
        if (converge->parsed()) return cmd_converge(manifest_file, limit_file, opt);
        if (actc->parsed()) return cmd_act(ms_file, mc_file, opt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
