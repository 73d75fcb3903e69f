#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "insitu/filter/encoders.hpp"

namespace insitu::filter {

struct SimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> values; ///< row-major n x n
    std::size_t modality_count = 0;

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values[i * n + j]; }

    static SimilarityMatrix from_rows(const std::vector<std::vector<double>>& rows, std::size_t modality_count = 1);
    friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;
};

/// Unit-normalized features, one slot per task; empty optional = modality
/// missing for that task.
using FeatureColumn = std::vector<std::optional<std::vector<double>>>;

/// Encodes and normalizes every task. Throws Errc::zero_vector when an
/// encoder emits an all-zero vector.
std::vector<FeatureColumn> encode_all(const std::vector<task::TaskInstance>& tasks, const EncoderSet& encoders);

/**
 * S_ij = mean over modalities of the cosine of the two feature vectors. A
 * modality missing on both tasks is left out of the mean for that pair; one
 * missing on just one side contributes 0. Diagonal is exactly 1.
 */
SimilarityMatrix similarity_from_features(const std::vector<FeatureColumn>& features);
/// Single-threaded reference; bit-identical to the parallel kernel.
SimilarityMatrix similarity_from_features_serial(const std::vector<FeatureColumn>& features);

/// encode_all followed by similarity_from_features. Needs >= 1 encoder.
SimilarityMatrix similarity(const std::vector<task::TaskInstance>& tasks, const EncoderSet& encoders);

inline constexpr const char* kSimilaritySchema = "insitu.similarity";
inline constexpr int kSimilaritySchemaVersion = 1;

/// One JSON header line (schema, n, modality_count, dtype, ids) followed by
/// n*n little-endian float64 values, row-major.
void write_similarity(const std::filesystem::path& path, const SimilarityMatrix& s,
                      const std::vector<std::string>& ids = {});
SimilarityMatrix read_similarity(const std::filesystem::path& path, std::vector<std::string>* ids = nullptr);

} // namespace insitu::filter
