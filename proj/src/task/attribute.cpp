#include "insitu/task/attribute.hpp"

#include <type_traits>

namespace insitu::task {

const char* kind_name(const AttributeValue& v) noexcept
{
    return std::visit(
        [](const auto& x) -> const char* {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Unbound>) return "unbound";
            else if constexpr (std::is_same_v<T, Label>) return "label";
            else if constexpr (std::is_same_v<T, ImageRef>) return "image_ref";
            else if constexpr (std::is_same_v<T, Position>) return "position";
            else if constexpr (std::is_same_v<T, BBox2D>) return "bbox2d";
            else if constexpr (std::is_same_v<T, BBox3D>) return "bbox3d";
            else if constexpr (std::is_same_v<T, Count>) return "count";
            else if constexpr (std::is_same_v<T, Depth>) return "depth";
            else if constexpr (std::is_same_v<T, RelationName>) return "relation_name";
            else return "answer_bool";
        },
        v);
}

bool attribute_valid(const AttributeValue& v) noexcept
{
    if (const auto* d = std::get_if<Depth>(&v)) {
        return d->value >= 0.0;
    }
    if (const auto* b = std::get_if<BBox2D>(&v)) {
        return b->value.u0 <= b->value.u1 && b->value.v0 <= b->value.v1;
    }
    if (const auto* r = std::get_if<ImageRef>(&v)) {
        return r->box.u0 <= r->box.u1 && r->box.v0 <= r->box.v1;
    }
    if (const auto* b = std::get_if<BBox3D>(&v)) {
        return b->value.valid();
    }
    return true;
}

} // namespace insitu::task
