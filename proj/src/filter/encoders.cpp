#include "insitu/filter/encoders.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "insitu/core/error.hpp"
#include "insitu/core/io.hpp"
#include "insitu/core/rng.hpp"
#include "insitu/gen/grounding.hpp"
#include "insitu/task/templates.hpp"

namespace insitu::filter {

using namespace task;

namespace {

std::size_t bucket(std::string_view s, std::size_t n) { return static_cast<std::size_t>(mix64(fnv1a(s)) % n); }

void collect_labels(const TaskGraph& g, std::vector<std::string>& out)
{
    for (const auto& v : g.vertices()) {
        for (const auto& [name, value] : v.attributes) {
            if (const auto* l = std::get_if<Label>(&value); l && (name == slot::label || name == slot::color)) {
                out.push_back(l->value);
            }
        }
    }
}

const ImageRef* first_image_ref(const TaskGraph& g)
{
    for (const auto& v : g.vertices()) {
        for (const auto& [name, value] : v.attributes) {
            if (const auto* r = std::get_if<ImageRef>(&value)) return r;
        }
    }
    return nullptr;
}

} // namespace

std::string label_text(const TaskInstance& inst)
{
    std::vector<std::string> parts;
    collect_labels(inst.task.final_state, parts);
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += ' ';
        s += p;
    }
    return s;
}

std::optional<std::vector<double>> LabelEncoder::encode(const TaskInstance& inst) const
{
    const std::string text = label_text(inst);
    if (text.empty()) return std::nullopt;
    const std::string padded = "^" + text + "$";
    std::vector<double> v(kDim, 0.0);
    if (padded.size() < 3) return v;
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) v[bucket(std::string_view(padded).substr(i, 3), kDim)] += 1.0;
    return v;
}

std::optional<std::vector<double>> PromptEncoder::encode(const TaskInstance& inst) const
{
    std::vector<double> v(kDim, 0.0);
    std::string tok;
    bool any = false;
    auto flush = [&] {
        if (tok.empty()) return;
        v[bucket(tok, kDim)] += 1.0;
        any = true;
        tok.clear();
    };
    for (unsigned char c : inst.prompt) {
        if (std::isalnum(c)) tok += static_cast<char>(std::tolower(c));
        else flush();
    }
    flush();
    if (!any) return std::nullopt;
    return v;
}

std::vector<double> crop_histogram(const sim::Scene& scene, const sim::Raster& raster, const PixelBox& box)
{
    std::vector<double> h(ImageCropEncoder::kDim, 0.0);
    const int u0 = std::max(0, box.u0), v0 = std::max(0, box.v0);
    const int u1 = std::min(raster.width, box.u1), v1 = std::min(raster.height, box.v1);
    for (int v = v0; v < v1; ++v) {
        for (int u = u0; u < u1; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * static_cast<std::size_t>(raster.width) + static_cast<std::size_t>(u);
            const sim::SceneEntity* e = scene.by_instance(raster.instance[i]);
            if (!e) {
                h[63] += 1.0;
                continue;
            }
            h[bucket(e->label, 32)] += 1.0;
            h[32 + bucket(e->color, 16)] += 1.0;
            const double d = raster.depth[i];
            h[48 + static_cast<std::size_t>(std::clamp(std::floor(d / 0.5), 0.0, 14.0))] += 1.0;
        }
    }
    return h;
}

ImageCropEncoder::ImageCropEncoder(const sim::Scene& scene, RecordLookup lookup) : scene_(scene), lookup_(std::move(lookup)) {}

std::optional<std::vector<double>> ImageCropEncoder::encode(const TaskInstance& inst) const
{
    const ImageRef* ref = first_image_ref(inst.task.initial);
    if (!ref) ref = first_image_ref(inst.task.final_state);
    if (!ref) return std::nullopt;
    const sim::ObservationRecord* rec = lookup_ ? lookup_(inst, ref->record_id) : nullptr;
    if (rec) return crop_histogram(scene_, rec->raster, ref->box);
    if (ref->record_id != inst.record_id) return std::nullopt;
    const sim::ObservationRecord fresh = gen::rerender(scene_, inst);
    return crop_histogram(scene_, fresh.raster, ref->box);
}

RemoteTextEncoder::RemoteTextEncoder(std::string endpoint, std::string modality, std::size_t dim)
    : endpoint_(std::move(endpoint)), modality_(std::move(modality)), dim_(dim)
{
    require(!endpoint_.empty(), "remote encoder needs an endpoint");
    require(modality_ == "label" || modality_ == "prompt", "remote encoder modality must be label or prompt");
}

std::optional<std::vector<double>> RemoteTextEncoder::encode(const TaskInstance& inst) const
{
    const std::string text = modality_ == "label" ? label_text(inst) : inst.prompt;
    if (text.empty()) return std::nullopt;
    httplib::Client cli(endpoint_);
    auto res = cli.Post("/encode", json{{"texts", {text}}}.dump(), "application/json");
    if (!res) throw Error(Errc::unreachable, "encoder " + endpoint_ + ": " + httplib::to_string(res.error()));
    try {
        const json j = json::parse(res->body);
        auto v = j.at("vectors").at(0).get<std::vector<double>>();
        if (v.size() != dim_) throw Error(Errc::malformed_response, "encoder returned dimension " + std::to_string(v.size()));
        return v;
    } catch (const json::exception& e) {
        throw Error(Errc::malformed_response, std::string("encoder reply: ") + e.what());
    }
}

EncoderSet default_encoders(const sim::Scene& scene, RecordLookup lookup)
{
    return {std::make_shared<LabelEncoder>(), std::make_shared<PromptEncoder>(),
            std::make_shared<ImageCropEncoder>(scene, std::move(lookup))};
}

EncoderSet encoders_from_env(const sim::Scene& scene, RecordLookup lookup)
{
    const char* ep = std::getenv(kEncoderEndpointEnv);
    if (!ep || !*ep) return default_encoders(scene, std::move(lookup));
    return {std::make_shared<RemoteTextEncoder>(ep, "label", LabelEncoder::kDim),
            std::make_shared<RemoteTextEncoder>(ep, "prompt", PromptEncoder::kDim),
            std::make_shared<ImageCropEncoder>(scene, std::move(lookup))};
}

} // namespace insitu::filter
