// Command-line front end: superpixel decomposition, metric evaluation,
// PR-curve generation, contour prior extraction, and batch benchmarking.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scalp/scalp.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

struct ParamFlags {
    int k = 200;
    int iters = 5;
    double lambda = 0.5;
    double sigma = 0.25;
    double gamma_factor = 2.0;
    double m = 10.0;

    void attach(CLI::App* cmd, bool with_k = true) {
        if (with_k)
            cmd->add_option("--k", k, "requested superpixel count")->required();
        cmd->add_option("--iters", iters, "clustering iterations");
        cmd->add_option("--lambda", lambda, "point/path color blend in [0,1]");
        cmd->add_option("--sigma", sigma, "contour sensitivity (> 0)");
        cmd->add_option("--gamma-factor", gamma_factor, "contour weight multiplier on r");
        cmd->add_option("--m", m, "compactness weight");
    }

    scalp::ScalpParams params() const {
        scalp::ScalpParams p;
        p.k = k;
        p.iterations = iters;
        p.lambda = lambda;
        p.sigma = sigma;
        p.gamma_factor = gamma_factor;
        p.m = m;
        return p;
    }
};

scalp::io::RenderMode parse_render_mode(const std::string& mode) {
    if (mode == "boundaries")
        return scalp::io::RenderMode::Boundaries;
    if (mode == "mean_color")
        return scalp::io::RenderMode::MeanColor;
    if (mode == "overlay")
        return scalp::io::RenderMode::Overlay;
    throw CLI::ValidationError("--render", "unknown mode '" + mode + "'");
}

// "lo..hixn", e.g. "6..600x12".
std::vector<int> parse_scales(const std::string& spec) {
    const auto dots = spec.find("..");
    const auto x = spec.rfind('x');
    if (dots == std::string::npos || x == std::string::npos || x < dots)
        throw CLI::ValidationError("--scales", "expected lo..hixn, e.g. 6..600x12");
    try {
        const int lo = std::stoi(spec.substr(0, dots));
        const int hi = std::stoi(spec.substr(dots + 2, x - dots - 2));
        const int n = std::stoi(spec.substr(x + 1));
        return scalp::scale_ladder(lo, hi, n);
    } catch (const scalp::ScalpError&) {
        throw CLI::ValidationError("--scales", "bad ladder in '" + spec + "'");
    } catch (const std::exception&) {
        throw CLI::ValidationError("--scales", "bad number in '" + spec + "'");
    }
}

std::vector<scalp::GroundTruth> load_gts(const std::vector<std::string>& paths) {
    std::vector<scalp::GroundTruth> gts;
    gts.reserve(paths.size());
    for (const auto& p : paths)
        gts.push_back(scalp::io::load_label_map(p));
    return gts;
}

void write_pr_csv(std::ostream& out, const std::vector<scalp::PrPoint>& curve) {
    out << "threshold,precision,recall\n";
    for (const auto& pt : curve)
        out << fmt(pt.threshold) << ',' << fmt(pt.precision) << ',' << fmt(pt.recall) << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"SCALP superpixel decomposition and evaluation"};
    app.require_subcommand(1);

    // decompose
    auto* cmd_dec = app.add_subcommand("decompose", "decompose an image into superpixels");
    std::string dec_image, dec_contour, dec_out, dec_render, dec_render_out;
    ParamFlags dec_params;
    cmd_dec->add_option("--image", dec_image, "input image (PNG or PPM)")->required();
    dec_params.attach(cmd_dec);
    cmd_dec->add_option("--contour", dec_contour, "contour prior map (grayscale PNG/PGM)");
    cmd_dec->add_option("--out", dec_out, "label map output (.png or .csv)");
    cmd_dec->add_option("--render", dec_render, "render mode: boundaries|mean_color|overlay");
    cmd_dec->add_option("--render-out", dec_render_out, "rendered image output (PNG)");

    // metrics
    auto* cmd_met = app.add_subcommand("metrics", "evaluate a label map against ground truth");
    std::string met_labels;
    std::vector<std::string> met_gts;
    double met_eps = 2.0;
    cmd_met->add_option("--labels", met_labels, "label map (PNG or CSV)")->required();
    cmd_met->add_option("--gt", met_gts, "ground-truth label map(s)")->required();
    cmd_met->add_option("--epsilon", met_eps, "boundary match tolerance in pixels");

    // prcurve
    auto* cmd_pr = app.add_subcommand("prcurve", "precision-recall over a scale ladder");
    std::string pr_image, pr_contour, pr_out, pr_scales = "6..600x12";
    std::vector<std::string> pr_gts;
    ParamFlags pr_params;
    cmd_pr->add_option("--image", pr_image, "input image")->required();
    cmd_pr->add_option("--contour", pr_contour, "contour prior map");
    cmd_pr->add_option("--gt", pr_gts, "ground-truth label map(s)")->required();
    cmd_pr->add_option("--scales", pr_scales, "scale ladder, lo..hixn");
    cmd_pr->add_option("--out", pr_out, "CSV output path (default: stdout)");
    pr_params.attach(cmd_pr, false);

    // prior
    auto* cmd_prior = app.add_subcommand("prior", "gradient-magnitude contour prior");
    std::string prior_image, prior_out;
    cmd_prior->add_option("--image", prior_image, "input image")->required();
    cmd_prior->add_option("--out", prior_out, "output map (grayscale PNG)")->required();

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "batch decomposition + metrics over a manifest");
    std::string bench_manifest, bench_out;
    double bench_eps = 2.0;
    ParamFlags bench_params;
    cmd_bench->add_option("--manifest", bench_manifest, "dataset manifest (image;gt1,gt2,...;contour)")
        ->required();
    cmd_bench->add_option("--out", bench_out, "CSV report path (default: stdout)");
    cmd_bench->add_option("--epsilon", bench_eps, "boundary match tolerance in pixels");
    bench_params.attach(cmd_bench, false);
    cmd_bench->add_option("--k", bench_params.k, "requested superpixel count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (cmd_dec->parsed()) {
        const scalp::RgbImage image = scalp::io::load_image(dec_image);
        std::optional<scalp::ContourMap> contour;
        if (!dec_contour.empty())
            contour = scalp::io::load_contour_map(dec_contour);
        const scalp::ScalpParams params =
            scalp::validate_params(dec_params.params(), image.width, image.height);
        const scalp::Decomposition dec =
            scalp::decompose(image, contour ? &*contour : nullptr, params);
        if (!dec_out.empty())
            scalp::io::save_label_map(dec_out, dec.labels);
        if (!dec_render.empty() || !dec_render_out.empty()) {
            if (dec_render.empty() || dec_render_out.empty())
                throw CLI::ValidationError("--render", "--render and --render-out go together");
            scalp::io::save_rgb_png(dec_render_out,
                                    scalp::io::render(dec.labels, image, parse_render_mode(dec_render)));
        }
        return 0;
    }

    if (cmd_met->parsed()) {
        const scalp::LabelMap labels = scalp::io::load_label_map(met_labels);
        const auto report = scalp::compute_metrics(labels, load_gts(met_gts), met_eps);
        std::cout << "br " << fmt(report.br) << '\n'
                  << "asa " << fmt(report.asa) << '\n'
                  << "ue " << fmt(report.ue) << '\n'
                  << "co " << fmt(report.co) << '\n';
        return 0;
    }

    if (cmd_pr->parsed()) {
        const scalp::RgbImage image = scalp::io::load_image(pr_image);
        std::optional<scalp::ContourMap> contour;
        if (!pr_contour.empty())
            contour = scalp::io::load_contour_map(pr_contour);
        const auto gts = load_gts(pr_gts);
        std::vector<scalp::LabelMap> maps;
        for (int k : parse_scales(pr_scales)) {
            scalp::ScalpParams params = pr_params.params();
            params.k = k;
            scalp::validate_params(params, image.width, image.height);
            maps.push_back(scalp::decompose(image, contour ? &*contour : nullptr, params).labels);
        }
        const scalp::ContourMap confidence = scalp::average_boundary_map(maps);
        const auto curve = scalp::pr_curve(confidence, gts, scalp::default_thresholds());
        if (pr_out.empty()) {
            write_pr_csv(std::cout, curve);
        } else {
            std::ofstream out(pr_out, std::ios::binary);
            if (!out)
                throw scalp::ScalpError(scalp::ErrorKind::Io, "cannot write " + pr_out);
            write_pr_csv(out, curve);
        }
        std::cout << "max_f " << fmt(scalp::max_f_measure(curve)) << '\n';
        return 0;
    }

    if (cmd_prior->parsed()) {
        scalp::io::save_contour_map(prior_out, scalp::io::fallback_prior(scalp::io::load_image(prior_image)));
        return 0;
    }

    if (cmd_bench->parsed()) {
        const auto entries = scalp::io::load_manifest(bench_manifest);
        std::ostringstream csv;
        csv << "image,br,asa,ue,co\n";
        for (const auto& entry : entries) {
            const scalp::RgbImage image = scalp::io::load_image(entry.image);
            std::optional<scalp::ContourMap> contour;
            if (!entry.contour.empty())
                contour = scalp::io::load_contour_map(entry.contour);
            const scalp::ScalpParams params =
                scalp::validate_params(bench_params.params(), image.width, image.height);
            const scalp::Decomposition dec =
                scalp::decompose(image, contour ? &*contour : nullptr, params);
            const auto report =
                scalp::compute_metrics(dec.labels, load_gts(entry.ground_truths), bench_eps);
            csv << entry.image << ',' << fmt(report.br) << ',' << fmt(report.asa) << ','
                << fmt(report.ue) << ',' << fmt(report.co) << '\n';
        }
        if (bench_out.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(bench_out, std::ios::binary);
            if (!out)
                throw scalp::ScalpError(scalp::ErrorKind::Io, "cannot write " + bench_out);
            out << csv.str();
        }
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const scalp::ScalpError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
