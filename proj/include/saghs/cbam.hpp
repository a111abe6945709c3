#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace saghs {

/// Dense C x H x W tensor, channel-major.
struct FeatureTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    FeatureTensor() = default;
    FeatureTensor(int c, int h, int w)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, 0.0) {}

    std::size_t size() const { return data.size(); }
    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

/// Shared-MLP weights for channel attention plus the 7x7 spatial kernel.
/// The MLP has no biases; only the spatial convolution carries one.
struct CbamWeights {
    int channels = 0;
    int reduction = 16;          // must divide channels
    std::vector<double> w0;      // (channels/reduction) x channels, row-major
    std::vector<double> w1;      // channels x (channels/reduction), row-major
    // conv7[0] filters the channel-average plane, conv7[1] the channel-max plane.
    std::array<std::array<std::array<double, 7>, 7>, 2> conv7{};
    double bias = 0.0;

    int hidden() const { return channels / reduction; }
};

/// Throws ShapeError naming the offending field when dimensions disagree.
void validate_weights(const CbamWeights& w);

/// sigmoid(W1 relu(W0 avgpool(f)) + W1 relu(W0 maxpool(f))): one gate per
/// channel, each strictly in (0, 1). Pooling runs over all H*W positions;
/// pooled sums accumulate in sorted order, so any spatial permutation of the
/// input yields bit-identical gates.
std::vector<double> channel_attention(const FeatureTensor& f, const CbamWeights& w);

/// sigmoid(conv7x7([avg over channels; max over channels]) + bias), zero
/// padding 3, one gate per position. Channel pooling likewise accumulates in
/// sorted order, so channel permutations yield bit-identical gates.
std::vector<double> spatial_attention(const FeatureTensor& f, const CbamWeights& w);

/// Channel gates first, spatial gates second, each applied multiplicatively.
/// Output shape equals input shape.
FeatureTensor cbam_forward(const FeatureTensor& f, const CbamWeights& w);

/// JSON weight file: {"C": int, "r": int, "w0": [[...]], "w1": [[...]],
/// "conv7": [[[...]]] (2 planes of 7x7), "bias": number}.
CbamWeights load_weights(const std::string& path);
void save_weights(const CbamWeights& w, const std::string& path);

/// JSON tensor file: {"C": int, "H": int, "W": int, "data": [C*H*W floats]}.
FeatureTensor load_tensor(const std::string& path);
void save_tensor(const FeatureTensor& f, const std::string& path);

}  // namespace saghs
