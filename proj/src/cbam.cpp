#include "saghs/cbam.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "saghs/errors.hpp"

namespace saghs {

namespace {

// Doubles saturate beyond |x| ~ 37 (745 on the underflow side); the gate
// contract is the open interval, so pin to the nearest representable values.
double sigmoid(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return std::clamp(s, std::numeric_limits<double>::min(),
                      1.0 - std::numeric_limits<double>::epsilon() / 2);
}

// Order-independent sum: identical multisets produce identical results
// regardless of the layout they arrived in.
double sorted_sum(std::vector<double>& scratch) {
    std::sort(scratch.begin(), scratch.end());
    double s = 0.0;
    for (double v : scratch) s += v;
    return s;
}

void check_tensor(const FeatureTensor& f, const CbamWeights& w) {
    if (f.channels < 1 || f.height < 1 || f.width < 1)
        throw ShapeError("tensor: dimensions must be positive");
    if (f.data.size() != static_cast<std::size_t>(f.channels) * f.height * f.width)
        throw ShapeError("tensor: data length does not match C*H*W");
    if (f.channels != w.channels)
        throw ShapeError("tensor: channel count " + std::to_string(f.channels) +
                         " does not match weights C=" + std::to_string(w.channels));
}

}  // namespace

void validate_weights(const CbamWeights& w) {
    if (w.channels < 1) throw ShapeError("C: must be >= 1");
    if (w.reduction < 1) throw ShapeError("r: must be >= 1");
    if (w.channels % w.reduction != 0)
        throw ShapeError("r: reduction " + std::to_string(w.reduction) +
                         " does not divide C=" + std::to_string(w.channels));
    const std::size_t hidden = static_cast<std::size_t>(w.channels) / w.reduction;
    if (w.w0.size() != hidden * w.channels)
        throw ShapeError("w0: expected shape (" + std::to_string(hidden) + ", " +
                         std::to_string(w.channels) + ")");
    if (w.w1.size() != static_cast<std::size_t>(w.channels) * hidden)
        throw ShapeError("w1: expected shape (" + std::to_string(w.channels) + ", " +
                         std::to_string(hidden) + ")");
    for (const auto& v : {w.bias})
        if (!std::isfinite(v)) throw ShapeError("bias: not finite");
}

std::vector<double> channel_attention(const FeatureTensor& f, const CbamWeights& w) {
    validate_weights(w);
    check_tensor(f, w);

    const int c_count = f.channels;
    const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
    const int hidden = w.hidden();

    std::vector<double> avg_pool(c_count), max_pool(c_count);
    std::vector<double> scratch(plane);
    for (int c = 0; c < c_count; ++c) {
        const double* p = f.data.data() + c * plane;
        std::copy(p, p + plane, scratch.begin());
        max_pool[c] = *std::max_element(scratch.begin(), scratch.end());
        avg_pool[c] = sorted_sum(scratch) / static_cast<double>(plane);
    }

    auto mlp = [&](const std::vector<double>& pooled) {
        std::vector<double> hid(hidden, 0.0);
        for (int i = 0; i < hidden; ++i) {
            double s = 0.0;
            for (int j = 0; j < c_count; ++j)
                s += w.w0[static_cast<std::size_t>(i) * c_count + j] * pooled[j];
            hid[i] = std::max(s, 0.0);  // ReLU
        }
        std::vector<double> out(c_count, 0.0);
        for (int i = 0; i < c_count; ++i) {
            double s = 0.0;
            for (int j = 0; j < hidden; ++j)
                s += w.w1[static_cast<std::size_t>(i) * hidden + j] * hid[j];
            out[i] = s;
        }
        return out;
    };

    const std::vector<double> from_avg = mlp(avg_pool);
    const std::vector<double> from_max = mlp(max_pool);
    std::vector<double> gates(c_count);
    for (int c = 0; c < c_count; ++c)
        gates[c] = sigmoid(from_avg[c] + from_max[c]);
    return gates;
}

std::vector<double> spatial_attention(const FeatureTensor& f, const CbamWeights& w) {
    validate_weights(w);
    check_tensor(f, w);

    const int h = f.height, wd = f.width, c_count = f.channels;
    const std::size_t plane = static_cast<std::size_t>(h) * wd;

    std::vector<double> avg_plane(plane), max_plane(plane);
    std::vector<double> scratch(c_count);
    for (std::size_t i = 0; i < plane; ++i) {
        for (int c = 0; c < c_count; ++c)
            scratch[c] = f.data[c * plane + i];
        max_plane[i] = *std::max_element(scratch.begin(), scratch.end());
        avg_plane[i] = sorted_sum(scratch) / static_cast<double>(c_count);
    }

    std::vector<double> gates(plane);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < wd; ++x) {
            double s = w.bias;
            for (int ky = 0; ky < 7; ++ky) {
                const int yy = y + ky - 3;
                if (yy < 0 || yy >= h) continue;  // zero padding
                for (int kx = 0; kx < 7; ++kx) {
                    const int xx = x + kx - 3;
                    if (xx < 0 || xx >= wd) continue;
                    const std::size_t i = static_cast<std::size_t>(yy) * wd + xx;
                    s += w.conv7[0][ky][kx] * avg_plane[i] + w.conv7[1][ky][kx] * max_plane[i];
                }
            }
            gates[static_cast<std::size_t>(y) * wd + x] = sigmoid(s);
        }
    return gates;
}

FeatureTensor cbam_forward(const FeatureTensor& f, const CbamWeights& w) {
    const std::vector<double> mc = channel_attention(f, w);
    const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;

    FeatureTensor refined = f;
    for (int c = 0; c < f.channels; ++c)
        for (std::size_t i = 0; i < plane; ++i)
            refined.data[c * plane + i] *= mc[c];

    const std::vector<double> ms = spatial_attention(refined, w);
    for (int c = 0; c < f.channels; ++c)
        for (std::size_t i = 0; i < plane; ++i)
            refined.data[c * plane + i] *= ms[i];
    return refined;
}

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": invalid JSON: " + e.what());
    }
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path + ": write failed");
}

std::vector<double> parse_matrix(const json& j, const std::string& field,
                                 std::size_t rows, std::size_t cols) {
    if (!j.is_array() || j.size() != rows)
        throw ShapeError(field + ": expected " + std::to_string(rows) + " rows");
    std::vector<double> m;
    m.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            throw ShapeError(field + ": expected " + std::to_string(cols) + " columns");
        for (const auto& v : row) m.push_back(v.get<double>());
    }
    return m;
}

}  // namespace

CbamWeights load_weights(const std::string& path) {
    const json j = read_json(path);
    for (const char* key : {"C", "r", "w0", "w1", "conv7", "bias"})
        if (!j.contains(key)) throw ShapeError(std::string(key) + ": missing field");

    CbamWeights w;
    w.channels = j["C"].get<int>();
    w.reduction = j["r"].get<int>();
    if (w.channels < 1) throw ShapeError("C: must be >= 1");
    if (w.reduction < 1) throw ShapeError("r: must be >= 1");
    if (w.channels % w.reduction != 0)
        throw ShapeError("r: reduction " + std::to_string(w.reduction) +
                         " does not divide C=" + std::to_string(w.channels));

    const std::size_t hidden = static_cast<std::size_t>(w.channels) / w.reduction;
    w.w0 = parse_matrix(j["w0"], "w0", hidden, w.channels);
    w.w1 = parse_matrix(j["w1"], "w1", w.channels, hidden);

    const json& k = j["conv7"];
    if (!k.is_array() || k.size() != 2)
        throw ShapeError("conv7: expected 2 planes (avg, max)");
    for (int p = 0; p < 2; ++p) {
        const std::vector<double> plane = parse_matrix(k[p], "conv7", 7, 7);
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 7; ++x)
                w.conv7[p][y][x] = plane[static_cast<std::size_t>(y) * 7 + x];
    }
    w.bias = j["bias"].get<double>();
    validate_weights(w);
    return w;
}

void save_weights(const CbamWeights& w, const std::string& path) {
    validate_weights(w);
    const std::size_t hidden = static_cast<std::size_t>(w.channels) / w.reduction;

    json j;
    j["C"] = w.channels;
    j["r"] = w.reduction;
    json w0 = json::array();
    for (std::size_t i = 0; i < hidden; ++i) {
        json row = json::array();
        for (int c = 0; c < w.channels; ++c)
            row.push_back(w.w0[i * w.channels + c]);
        w0.push_back(std::move(row));
    }
    j["w0"] = std::move(w0);
    json w1 = json::array();
    for (int i = 0; i < w.channels; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < hidden; ++c)
            row.push_back(w.w1[static_cast<std::size_t>(i) * hidden + c]);
        w1.push_back(std::move(row));
    }
    j["w1"] = std::move(w1);
    json conv = json::array();
    for (int p = 0; p < 2; ++p) {
        json plane = json::array();
        for (int y = 0; y < 7; ++y) {
            json row = json::array();
            for (int x = 0; x < 7; ++x) row.push_back(w.conv7[p][y][x]);
            plane.push_back(std::move(row));
        }
        conv.push_back(std::move(plane));
    }
    j["conv7"] = std::move(conv);
    j["bias"] = w.bias;
    write_json(j, path);
}

FeatureTensor load_tensor(const std::string& path) {
    const json j = read_json(path);
    for (const char* key : {"C", "H", "W", "data"})
        if (!j.contains(key)) throw ShapeError(std::string(key) + ": missing field");

    FeatureTensor f;
    f.channels = j["C"].get<int>();
    f.height = j["H"].get<int>();
    f.width = j["W"].get<int>();
    if (f.channels < 1 || f.height < 1 || f.width < 1)
        throw ShapeError("C/H/W: dimensions must be positive");

    const json& d = j["data"];
    const std::size_t expect = static_cast<std::size_t>(f.channels) * f.height * f.width;
    if (!d.is_array() || d.size() != expect)
        throw ShapeError("data: expected " + std::to_string(expect) + " values");
    f.data.reserve(expect);
    for (const auto& v : d) f.data.push_back(v.get<double>());
    return f;
}

void save_tensor(const FeatureTensor& f, const std::string& path) {
    json j;
    j["C"] = f.channels;
    j["H"] = f.height;
    j["W"] = f.width;
    j["data"] = f.data;
    write_json(j, path);
}

}  // namespace saghs
