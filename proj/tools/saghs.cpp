// Batch front door: enhance images or directories of images, emit enhanced
// PNGs plus an optional JSON report, and run the attention-block reference
// on weight + tensor files.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "saghs/cbam.hpp"
#include "saghs/errors.hpp"
#include "saghs/histogram.hpp"
#include "saghs/image.hpp"
#include "saghs/metrics.hpp"
#include "saghs/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitInvalid = 2;

struct JobSpec {
    fs::path input;
    fs::path output_dir;
    saghs::PipelineConfig config;
    fs::path report;            // empty = no report
    int parallelism = 1;
    double repeatability_deg = 0.0;  // 0 = skip the corner measure
};

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> collect_inputs(const fs::path& input) {
    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.is_regular_file() && has_image_extension(entry.path()))
                files.push_back(entry.path());
    } else {
        files.push_back(input);
    }
    std::sort(files.begin(), files.end());
    return files;
}

ordered_json metrics_json(const saghs::MetricsReport& m) {
    ordered_json j;
    j["entropy"] = {m.entropy[0], m.entropy[1], m.entropy[2]};
    j["rms_contrast"] = {m.rms_contrast[0], m.rms_contrast[1], m.rms_contrast[2]};
    j["mean"] = {m.mean[0], m.mean[1], m.mean[2]};
    j["channel_imbalance"] = m.channel_imbalance;
    if (m.corner_repeatability)
        j["corner_repeatability"] = *m.corner_repeatability;
    return j;
}

ordered_json histograms_json(const saghs::RgbImage& img) {
    ordered_json j = ordered_json::array();
    for (int c = 0; c < 3; ++c) {
        const auto stats = saghs::channel_stats(img, static_cast<saghs::Channel>(c));
        j.push_back(stats.hist);
    }
    return j;
}

ordered_json trace_json(const saghs::EnhancementTrace& t) {
    ordered_json j;
    j["gains"] = {{"g", t.g_gain}, {"b", t.b_gain}, {"degenerate", t.gains_degenerate}};
    ordered_json channels = ordered_json::array();
    for (const auto& ct : t.channels) {
        const auto& p = ct.params;
        channels.push_back({{"channel", saghs::channel_name(p.channel)},
                            {"i_min", p.i_min},
                            {"i_max", p.i_max},
                            {"o_min", p.o_min},
                            {"o_max", p.o_max},
                            {"beta", p.beta},
                            {"mu", p.mu},
                            {"kappa", p.kappa},
                            {"t", p.t},
                            {"fallback", p.fallback},
                            {"degenerate", ct.degenerate}});
    }
    j["channels"] = std::move(channels);
    j["l_stretch"] = {{"lo", t.l_lo}, {"hi", t.l_hi}, {"degenerate", t.l_degenerate}};
    return j;
}

ordered_json config_json(const JobSpec& job) {
    const auto& c = job.config;
    ordered_json j;
    j["clip"] = c.clip;
    j["kappa"] = c.kappa;
    j["t"] = {c.t[0], c.t[1], c.t[2]};
    j["phi"] = c.phi;
    j["bilateral"] = {{"enabled", c.bilateral_enabled},
                      {"radius", c.bilateral_radius},
                      {"sigma_spatial", c.bilateral_sigma_spatial},
                      {"sigma_range", c.bilateral_sigma_range}};
    j["coeff_strategy"] = saghs::coeff_strategy_name(c.strategy);
    // worker count deliberately left out: outputs must not depend on it
    return j;
}

void write_text_atomic(const std::string& text, const fs::path& path) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw saghs::IoError(path.string() + ": cannot open for writing");
        out << text;
        if (!out) throw saghs::IoError(path.string() + ": write failed");
    }
    fs::rename(tmp, path);
}

std::string timestamp_utc() {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ImageResult {
    ordered_json entry;
    bool ok = false;
    bool degenerate = false;
};

ImageResult process_one(const fs::path& in_path, const JobSpec& job) {
    ImageResult res;
    res.entry["input"] = in_path.string();
    const fs::path out_path = job.output_dir / (in_path.stem().string() + ".enhanced.png");
    try {
        const saghs::RgbImage img = saghs::load_image(in_path.string());
        auto [enhanced, trace] = saghs::enhance(img, job.config);

        if (job.repeatability_deg > 0.0) {
            const auto rep = saghs::corner_repeatability(img, enhanced, job.repeatability_deg);
            if (rep.original.sufficient)
                trace.pre.corner_repeatability = rep.original.fraction;
            if (rep.enhanced.sufficient)
                trace.post.corner_repeatability = rep.enhanced.fraction;
        }

        const fs::path tmp = out_path.string() + ".tmp";
        saghs::save_image(enhanced, tmp.string());
        fs::rename(tmp, out_path);

        res.entry["output"] = out_path.string();
        res.entry["status"] = "ok";
        res.entry["trace"] = trace_json(trace);
        res.entry["metrics_pre"] = metrics_json(trace.pre);
        res.entry["metrics_post"] = metrics_json(trace.post);
        res.entry["histograms_pre"] = histograms_json(img);
        res.entry["histograms_post"] = histograms_json(enhanced);
        res.ok = true;
        res.degenerate = trace.any_degenerate();
    } catch (const std::exception& e) {
        res.entry["status"] = "failed";
        res.entry["error"] = e.what();
    }
    return res;
}

int run_enhance(const JobSpec& job) {
    if (!fs::exists(job.input)) {
        std::cerr << "error: input does not exist: " << job.input << "\n";
        return kExitInvalid;
    }
    const std::vector<fs::path> files = collect_inputs(job.input);
    if (files.empty()) {
        std::cerr << "error: no inputs under " << job.input << "\n";
        return kExitInvalid;
    }

    std::error_code ec;
    fs::create_directories(job.output_dir, ec);
    const fs::path canon_out = fs::weakly_canonical(job.output_dir);
    for (const auto& f : files) {
        if (fs::weakly_canonical(f.parent_path()) == canon_out) {
            std::cerr << "error: output directory equals an input directory "
                         "(refusing in-place overwrite)\n";
            return kExitInvalid;
        }
    }
    std::set<std::string> stems;
    for (const auto& f : files) {
        if (!stems.insert(f.stem().string()).second) {
            std::cerr << "error: inputs share the stem '" << f.stem().string()
                      << "'; outputs would collide\n";
            return kExitInvalid;
        }
    }

    std::vector<ImageResult> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) break;
            results[i] = process_one(files[i], job);
        }
    };
    const int n_workers = std::min<std::size_t>(job.parallelism, files.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    int ok = 0, degenerate = 0, failed = 0;
    for (const auto& r : results) {
        if (r.ok) {
            ++ok;
            if (r.degenerate) ++degenerate;
        } else {
            ++failed;
            std::cerr << "failed: " << r.entry["input"].get<std::string>() << ": "
                      << r.entry["error"].get<std::string>() << "\n";
        }
    }

    if (!job.report.empty()) {
        ordered_json report;
        report["generated_at"] = timestamp_utc();
        report["config"] = config_json(job);
        ordered_json images = ordered_json::array();
        for (auto& r : results) images.push_back(std::move(r.entry));
        report["images"] = std::move(images);
        report["summary"] = {{"ok", ok}, {"degenerate", degenerate}, {"failed", failed}};
        write_text_atomic(report.dump(2) + "\n", job.report);
    }

    std::cout << "ok: " << ok << " degenerate: " << degenerate << " failed: " << failed << "\n";
    return failed > 0 ? kExitPartialFailure : kExitOk;
}

// Key=value config file; keys match the long flag names. Values given on the
// command line win over file values.
void apply_config_file(const std::string& path, const CLI::App* enh, JobSpec& job,
                       std::array<double, 3>& t_rgb, bool& no_bilateral,
                       std::string& strategy) {
    std::ifstream in(path);
    if (!in) throw saghs::IoError(path + ": cannot open config file");

    auto flag_given = [&](const std::string& flag) { return enh->get_option(flag)->count() > 0; };
    auto to_double = [&](const std::string& k, const std::string& v, double lo, double hi) {
        double d = 0.0;
        try {
            d = std::stod(v);
        } catch (...) {
            throw std::invalid_argument(path + ": bad value for " + k + ": " + v);
        }
        if (d < lo || d > hi)
            throw std::invalid_argument(path + ": " + k + " out of range [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return d;
    };
    auto to_bool = [&](const std::string& k, const std::string& v) {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::invalid_argument(path + ": bad boolean for " + k + ": " + v);
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        auto trim = [](const std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "clip") {
            if (!flag_given("--clip")) job.config.clip = to_double(key, value, 1e-6, 0.499);
        } else if (key == "kappa") {
            if (!flag_given("--kappa")) job.config.kappa = to_double(key, value, 1e-9, 1e9);
        } else if (key == "t-red") {
            if (!flag_given("--t-red")) t_rgb[0] = to_double(key, value, 1e-6, 1.0);
        } else if (key == "t-green") {
            if (!flag_given("--t-green")) t_rgb[1] = to_double(key, value, 1e-6, 1.0);
        } else if (key == "t-blue") {
            if (!flag_given("--t-blue")) t_rgb[2] = to_double(key, value, 1e-6, 1.0);
        } else if (key == "phi") {
            if (!flag_given("--phi")) job.config.phi = to_double(key, value, 1.2, 2.0);
        } else if (key == "bilateral-radius") {
            if (!flag_given("--bilateral-radius"))
                job.config.bilateral_radius = static_cast<int>(to_double(key, value, 1, 32));
        } else if (key == "bilateral-sigma-s") {
            if (!flag_given("--bilateral-sigma-s"))
                job.config.bilateral_sigma_spatial = to_double(key, value, 1e-9, 1e9);
        } else if (key == "bilateral-sigma-r") {
            if (!flag_given("--bilateral-sigma-r"))
                job.config.bilateral_sigma_range = to_double(key, value, 1e-9, 1e9);
        } else if (key == "no-bilateral") {
            if (!flag_given("--no-bilateral")) no_bilateral = to_bool(key, value);
        } else if (key == "coeff-strategy") {
            if (!flag_given("--coeff-strategy")) {
                saghs::parse_coeff_strategy(value);  // validates
                strategy = value;
            }
        } else if (key == "jobs") {
            if (!flag_given("--jobs"))
                job.parallelism = static_cast<int>(to_double(key, value, 1, 256));
        } else if (key == "repeatability-deg") {
            if (!flag_given("--repeatability-deg"))
                job.repeatability_deg = to_double(key, value, 0.0, 45.0);
        } else {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
}

int run_cbam(const fs::path& weights_path, const fs::path& tensor_path,
             const fs::path& out_path) {
    const saghs::CbamWeights weights = saghs::load_weights(weights_path.string());
    const saghs::FeatureTensor input = saghs::load_tensor(tensor_path.string());

    const std::vector<double> mc = saghs::channel_attention(input, weights);
    const saghs::FeatureTensor output = saghs::cbam_forward(input, weights);

    // The spatial gate of the forward pass acts on the channel-refined tensor.
    saghs::FeatureTensor refined = input;
    const std::size_t plane = static_cast<std::size_t>(input.height) * input.width;
    for (int c = 0; c < input.channels; ++c)
        for (std::size_t i = 0; i < plane; ++i)
            refined.data[c * plane + i] *= mc[c];
    const std::vector<double> ms = saghs::spatial_attention(refined, weights);

    auto min_max = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return std::pair<double, double>(*lo, *hi);
    };
    const auto [mc_lo, mc_hi] = min_max(mc);
    const auto [ms_lo, ms_hi] = min_max(ms);

    saghs::save_tensor(output, out_path.string());

    std::printf("input: %dx%dx%d\n", input.channels, input.height, input.width);
    std::printf("channel attention: min %.6f max %.6f\n", mc_lo, mc_hi);
    std::printf("spatial attention: min %.6f max %.6f\n", ms_lo, ms_hi);
    std::printf("output: %dx%dx%d -> %s\n", output.channels, output.height, output.width,
                out_path.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater image enhancement via self-adaptive global histogram "
                 "stretching, with a desk-scale attention-block reference"};
    app.require_subcommand(1);

    JobSpec job;
    job.parallelism = std::max(1u, std::thread::hardware_concurrency());
    double t_red = job.config.t[0], t_green = job.config.t[1], t_blue = job.config.t[2];
    bool no_bilateral = false;
    std::string strategy = "midpoint";
    std::string input, out_dir, report;

    CLI::App* enh = app.add_subcommand("enhance", "Enhance an image or a directory of images");
    enh->add_option("input", input, "Input image or directory")->required();
    enh->add_option("-o,--out", out_dir, "Output directory")->required();
    enh->add_option("--clip", job.config.clip, "Stretch range tail fraction")
        ->check(CLI::Range(1e-6, 0.499));
    enh->add_option("--kappa", job.config.kappa, "Correction factor")
        ->check(CLI::PositiveNumber);
    enh->add_option("--t-red", t_red, "Red channel transmission")->check(CLI::Range(1e-6, 1.0));
    enh->add_option("--t-green", t_green, "Green channel transmission")
        ->check(CLI::Range(1e-6, 1.0));
    enh->add_option("--t-blue", t_blue, "Blue channel transmission")
        ->check(CLI::Range(1e-6, 1.0));
    enh->add_option("--phi", job.config.phi, "Chroma S-curve base")
        ->check(CLI::Range(1.2, 2.0));
    enh->add_option("--bilateral-radius", job.config.bilateral_radius, "Window radius, px")
        ->check(CLI::Range(1, 32));
    enh->add_option("--bilateral-sigma-s", job.config.bilateral_sigma_spatial,
                    "Spatial sigma, px")
        ->check(CLI::PositiveNumber);
    enh->add_option("--bilateral-sigma-r", job.config.bilateral_sigma_range,
                    "Range sigma, channel units")
        ->check(CLI::PositiveNumber);
    enh->add_flag("--no-bilateral", no_bilateral, "Skip the denoising pass");
    enh->add_option("--coeff-strategy", strategy, "Coefficient pick: midpoint|lower|upper")
        ->check(CLI::IsMember({"midpoint", "lower", "upper"}));
    enh->add_option("--report", report, "Write a JSON report to this path");
    enh->add_option("--jobs", job.parallelism, "Worker count")->check(CLI::Range(1, 256));
    enh->add_option("--repeatability-deg", job.repeatability_deg,
                    "Also measure corner repeatability at this rotation (0 = off)")
        ->check(CLI::Range(0.0, 45.0));
    std::string config_path;
    enh->add_option("--config", config_path,
                    "Key=value file with the same keys as the flags above; "
                    "flags given on the command line win");

    std::string weights_path, tensor_path, cbam_out;
    CLI::App* cbam = app.add_subcommand("cbam", "Run the attention block on a tensor file");
    cbam->add_option("--weights", weights_path, "Weight JSON file")->required();
    cbam->add_option("--tensor", tensor_path, "Input tensor JSON file")->required();
    cbam->add_option("-o,--out", cbam_out, "Output tensor JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (enh->parsed()) {
            job.input = input;
            job.output_dir = out_dir;
            job.report = report;
            std::array<double, 3> t_rgb{t_red, t_green, t_blue};
            if (!config_path.empty())
                apply_config_file(config_path, enh, job, t_rgb, no_bilateral, strategy);
            job.config.t = t_rgb;
            job.config.bilateral_enabled = !no_bilateral;
            job.config.strategy = saghs::parse_coeff_strategy(strategy);
            return run_enhance(job);
        }
        return run_cbam(weights_path, tensor_path, cbam_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
