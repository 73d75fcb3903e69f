#include "insitu/filter/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "insitu/core/error.hpp"
#include "insitu/core/io.hpp"

namespace insitu::filter {

SimilarityMatrix SimilarityMatrix::from_rows(const std::vector<std::vector<double>>& rows, std::size_t modality_count)
{
    SimilarityMatrix s;
    s.n = rows.size();
    s.modality_count = modality_count;
    s.values.reserve(s.n * s.n);
    for (const auto& r : rows) {
        require(r.size() == s.n, "similarity rows must be square");
        s.values.insert(s.values.end(), r.begin(), r.end());
    }
    return s;
}

std::vector<FeatureColumn> encode_all(const std::vector<task::TaskInstance>& tasks, const EncoderSet& encoders)
{
    require(!encoders.empty(), "similarity needs at least one encoder");
    std::vector<FeatureColumn> out(encoders.size(), FeatureColumn(tasks.size()));
    std::vector<std::exception_ptr> errs(tasks.size());
    const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        const auto ti = static_cast<std::size_t>(i);
        try {
            for (std::size_t m = 0; m < encoders.size(); ++m) {
                auto v = encoders[m]->encode(tasks[ti]);
                if (!v) continue;
                double nn = 0.0;
                for (double x : *v) nn += x * x;
                if (nn == 0.0) {
                    throw Error(Errc::zero_vector,
                                encoders[m]->name() + " encoder gave a zero vector for " + tasks[ti].id);
                }
                const double inv = 1.0 / std::sqrt(nn);
                for (double& x : *v) x *= inv;
                out[m][ti] = std::move(v);
            }
        } catch (...) {
            errs[ti] = std::current_exception();
        }
    }
    for (const auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

namespace {

double pair_similarity(const std::vector<FeatureColumn>& f, std::size_t i, std::size_t j) noexcept
{
    double sum = 0.0;
    int used = 0;
    for (const auto& col : f) {
        const auto& a = col[i];
        const auto& b = col[j];
        if (!a && !b) continue;
        ++used;
        if (a && b) {
            double d = 0.0;
            for (std::size_t k = 0; k < a->size(); ++k) d += (*a)[k] * (*b)[k];
            sum += d;
        }
    }
    return used ? std::clamp(sum / used, -1.0, 1.0) : 0.0;
}

SimilarityMatrix make_empty(const std::vector<FeatureColumn>& f)
{
    SimilarityMatrix s;
    s.n = f.empty() ? 0 : f.front().size();
    s.modality_count = f.size();
    s.values.assign(s.n * s.n, 0.0);
    return s;
}

void fill_row(SimilarityMatrix& s, const std::vector<FeatureColumn>& f, std::size_t i) noexcept
{
    s(i, i) = 1.0;
    for (std::size_t j = i + 1; j < s.n; ++j) {
        const double v = pair_similarity(f, i, j);
        s(i, j) = v;
        s(j, i) = v;
    }
}

} // namespace

SimilarityMatrix similarity_from_features_serial(const std::vector<FeatureColumn>& features)
{
    SimilarityMatrix s = make_empty(features);
    for (std::size_t i = 0; i < s.n; ++i) fill_row(s, features, i);
    return s;
}

SimilarityMatrix similarity_from_features(const std::vector<FeatureColumn>& features)
{
    SimilarityMatrix s = make_empty(features);
    const long n = static_cast<long>(s.n);
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) fill_row(s, features, static_cast<std::size_t>(i));
    return s;
}

SimilarityMatrix similarity(const std::vector<task::TaskInstance>& tasks, const EncoderSet& encoders)
{
    return similarity_from_features(encode_all(tasks, encoders));
}

void write_similarity(const std::filesystem::path& path, const SimilarityMatrix& s, const std::vector<std::string>& ids)
{
    static_assert(std::endian::native == std::endian::little, "similarity files are little-endian");
    require(ids.empty() || ids.size() == s.n, "one id per row");
    json h = schema_header(kSimilaritySchema, kSimilaritySchemaVersion);
    h["n"] = s.n;
    h["modality_count"] = s.modality_count;
    h["dtype"] = "float64";
    h["order"] = "row-major";
    h["ids"] = ids;
    std::string out = h.dump() + "\n";
    const std::size_t off = out.size();
    out.resize(off + s.values.size() * sizeof(double));
    if (!s.values.empty()) std::memcpy(out.data() + off, s.values.data(), s.values.size() * sizeof(double));
    write_file(path, out);
}

SimilarityMatrix read_similarity(const std::filesystem::path& path, std::vector<std::string>* ids)
{
    const std::string data = read_file(path);
    const auto nl = data.find('\n');
    if (nl == std::string::npos) throw Error(Errc::schema_version, path.string() + " has no header line");
    json h;
    try {
        h = json::parse(data.substr(0, nl));
    } catch (const json::exception&) {
        throw Error(Errc::schema_version, path.string() + " header is not JSON");
    }
    check_schema(h, kSimilaritySchema, kSimilaritySchemaVersion);
    SimilarityMatrix s;
    s.n = h.at("n").get<std::size_t>();
    s.modality_count = h.at("modality_count").get<std::size_t>();
    const std::size_t bytes = s.n * s.n * sizeof(double);
    if (data.size() - nl - 1 != bytes) throw Error(Errc::io, path.string() + ": payload size does not match n");
    s.values.resize(s.n * s.n);
    if (bytes) std::memcpy(s.values.data(), data.data() + nl + 1, bytes);
    if (ids) *ids = h.value("ids", std::vector<std::string>{});
    return s;
}

} // namespace insitu::filter
