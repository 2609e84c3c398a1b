#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "vitalcast/series.hpp"

namespace vitalcast {

/// Parameter set for the forecaster F = (encoder f, prediction head h,
/// reconstruction head g): one tanh layer with layer normalization feeding
/// both heads. D = L*C is the flattened input width.
struct ForecasterParams {
    std::size_t lookback = 0;  // L
    std::size_t channels = 0;  // C
    std::size_t horizon = 0;   // H
    std::size_t hidden = 64;   // d

    std::vector<double> w_in;     // d x D, row-major
    std::vector<double> b_in;     // d
    std::vector<double> ln_gain;  // d
    std::vector<double> ln_bias;  // d
    std::vector<double> w_pred;   // H x d
    std::vector<double> b_pred;   // H
    std::vector<double> w_recon;  // D x d
    std::vector<double> b_recon;  // D

    std::size_t input_width() const { return lookback * channels; }
    friend bool operator==(const ForecasterParams&, const ForecasterParams&) = default;
};

/// Which parameter blocks test-time adaptation may touch. Biases travel with
/// their matrices; the two layer-norm vectors form one block.
struct UpdateMask {
    bool w_in = true;
    bool ln = true;
    bool w_pred = true;
    bool w_recon = true;

    void validate() const;  // at least one block must be trainable
};

/// Contiguous-patch masking for the reconstruction objective.
struct MaskSpec {
    double mask_ratio = 0.25;
    std::size_t patch_len = 0;  // 0 = default: max(2, H/2)
    std::uint64_t seed = 0;

    std::size_t effective_patch_len(std::size_t horizon) const;
    void validate() const;
};

/// Same shapes as ForecasterParams; blocks outside the update mask are zero.
struct Gradients {
    std::vector<double> w_in, b_in, ln_gain, ln_bias, w_pred, b_pred, w_recon, b_recon;
};

/// Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, identity layer
/// norm.
ForecasterParams init_params(std::size_t lookback, std::size_t channels, std::size_t horizon,
                             std::size_t hidden, std::uint64_t seed);

/// Per-channel boolean mask (L x C, row-major) of contiguous patches covering
/// at least round(mask_ratio * L) positions per channel. `salt` keeps masks
/// distinct yet reproducible across the samples of a batch.
std::vector<std::uint8_t> make_recon_mask(std::size_t lookback, std::size_t channels,
                                          std::size_t horizon, const MaskSpec& spec,
                                          std::uint64_t salt);

/// Instance-normalized forward pass. Returns the de-normalized H-step MAP
/// forecast and the shared encoding z.
std::pair<std::vector<double>, std::vector<double>> forward(const ForecasterParams& params,
                                                            const Matrix& x);

/// MSE between prediction and target in normalized space.
double loss_pred(const ForecasterParams& params, const Sample& sample);

/// Masked reconstruction: the encoder sees the masked normalized lookback and
/// the loss scores only the masked positions.
double loss_recon(const ForecasterParams& params, const Sample& sample, const MaskSpec& mask);

/// Analytic gradient of mean over the batch of loss_pred + recon_weight *
/// loss_recon, zeroed outside the update mask. Sample i uses mask salt i.
Gradients grad_combined(const ForecasterParams& params, std::span<const Sample> batch,
                        const MaskSpec& mask_spec, const UpdateMask& update_mask,
                        double recon_weight = 1.0);

/// Plain SGD; gradients are already zero outside the update mask, so frozen
/// blocks come out bit-identical.
void sgd_step(ForecasterParams& params, const Gradients& grads, double lr);

/// Mean loss_pred over a sample set (validation utility).
double mean_pred_loss(const ForecasterParams& params, std::span<const Sample> samples);

/// Seeded minibatch SGD over the full parameter set; one shuffle per epoch.
/// Returns the per-epoch mean training loss.
std::vector<double> train_offline(ForecasterParams& params, std::span<const Sample> samples,
                                  std::size_t epochs, double lr, std::size_t batch_size,
                                  const MaskSpec& mask_spec, std::uint64_t seed,
                                  double recon_weight = 1.0);

void save_checkpoint(const ForecasterParams& params, const std::filesystem::path& file);
ForecasterParams load_checkpoint(const std::filesystem::path& file);

}  // namespace vitalcast
