#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "insitu/sim/render.hpp"
#include "insitu/task/task.hpp"

namespace insitu::filter {

/// One modality's featurizer. Returns nullopt when the task has nothing for
/// this modality (no label slot, no image crop).
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::optional<std::vector<double>> encode(const task::TaskInstance& inst) const = 0;
};

/// Hashes character trigrams of the task's label and color values.
class LabelEncoder final : public Encoder {
public:
    static constexpr std::size_t kDim = 256;
    std::string name() const override { return "label"; }
    std::size_t dim() const override { return kDim; }
    std::optional<std::vector<double>> encode(const task::TaskInstance& inst) const override;
};

/// Hashes lowercase word tokens of the prompt.
class PromptEncoder final : public Encoder {
public:
    static constexpr std::size_t kDim = 512;
    std::string name() const override { return "prompt"; }
    std::size_t dim() const override { return kDim; }
    std::optional<std::vector<double>> encode(const task::TaskInstance& inst) const override;
};

/// Finds the observation an image_ref points at.
using RecordLookup = std::function<const sim::ObservationRecord*(const task::TaskInstance&, const std::string& record_id)>;

/**
 * 64-bin histogram over the pixels of the task's first image_ref crop:
 * 32 bins for hashed entity labels, 16 for hashed colors, 15 depth bins of
 * 0.5 m and one bin for pixels that hit nothing.
 */
class ImageCropEncoder final : public Encoder {
public:
    static constexpr std::size_t kDim = 64;
    ImageCropEncoder(const sim::Scene& scene, RecordLookup lookup);
    std::string name() const override { return "image"; }
    std::size_t dim() const override { return kDim; }
    std::optional<std::vector<double>> encode(const task::TaskInstance& inst) const override;

private:
    const sim::Scene& scene_;
    RecordLookup lookup_;
};

/// Histogram of a crop, exposed for tests.
std::vector<double> crop_histogram(const sim::Scene& scene, const sim::Raster& raster, const PixelBox& box);

inline constexpr const char* kEncoderEndpointEnv = "INSITU_ENCODER_ENDPOINT";

/**
 * Text modality served over HTTP: POST /encode {"texts": [..]} returning
 * {"vectors": [[..]]}. `modality` is "label" or "prompt" and selects the
 * text sent, as in the local encoders.
 */
class RemoteTextEncoder final : public Encoder {
public:
    RemoteTextEncoder(std::string endpoint, std::string modality, std::size_t dim);
    std::string name() const override { return modality_; }
    std::size_t dim() const override { return dim_; }
    std::optional<std::vector<double>> encode(const task::TaskInstance& inst) const override;

private:
    std::string endpoint_;
    std::string modality_;
    std::size_t dim_;
};

/// Text the label encoder reads; empty when the task has no label slot.
std::string label_text(const task::TaskInstance& inst);

using EncoderSet = std::vector<std::shared_ptr<const Encoder>>;

/// Label, prompt and image-crop encoders. Image crops are re-rendered from
/// the instance pose unless `lookup` finds the record.
EncoderSet default_encoders(const sim::Scene& scene, RecordLookup lookup = {});

/// default_encoders, with the label and prompt modalities served by
/// RemoteTextEncoder when INSITU_ENCODER_ENDPOINT is set.
EncoderSet encoders_from_env(const sim::Scene& scene, RecordLookup lookup = {});

} // namespace insitu::filter
