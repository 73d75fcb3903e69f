#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "insitu/core/geometry.hpp"

namespace insitu::task {

/// Placeholder for an attribute slot a template leaves open.
struct Unbound {
    friend bool operator==(const Unbound&, const Unbound&) = default;
};

struct Label {
    std::string value;
    friend bool operator==(const Label&, const Label&) = default;
};

/// Crop of an observation record: record id plus pixel box.
struct ImageRef {
    std::string record_id;
    PixelBox box;
    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct Position {
    Vec3 value;
    friend bool operator==(const Position&, const Position&) = default;
};

struct BBox2D {
    PixelBox value;
    friend bool operator==(const BBox2D&, const BBox2D&) = default;
};

struct BBox3D {
    Aabb value;
    friend bool operator==(const BBox3D&, const BBox3D&) = default;
};

struct Count {
    std::uint32_t value = 0;
    friend bool operator==(const Count&, const Count&) = default;
};

struct Depth {
    double value = 0.0;
    friend bool operator==(const Depth&, const Depth&) = default;
};

struct RelationName {
    std::string value;
    friend bool operator==(const RelationName&, const RelationName&) = default;
};

struct AnswerBool {
    bool value = false;
    friend bool operator==(const AnswerBool&, const AnswerBool&) = default;
};

using AttributeValue =
    std::variant<Unbound, Label, ImageRef, Position, BBox2D, BBox3D, Count, Depth, RelationName, AnswerBool>;

inline bool is_unbound(const AttributeValue& v) noexcept { return std::holds_alternative<Unbound>(v); }

/// Lowercase kind tag used by the JSON schema ("label", "image_ref", ...).
const char* kind_name(const AttributeValue& v) noexcept;

/// Checks the value-level invariants: depth >= 0, boxes ordered per axis.
bool attribute_valid(const AttributeValue& v) noexcept;

} // namespace insitu::task
