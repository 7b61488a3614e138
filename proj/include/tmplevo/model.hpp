// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared by every stage of the pipeline: the element triple an
// image is decomposed into, the prompt template genome, individuals and
// populations, image references and embedding vectors.

#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tmplevo {

using nlohmann::json;

enum class ModifierCategory {
    ArtisticStyle,
    VisualCompositionStructure,
    AestheticEmotionalAtmosphere,
    MediumMaterial,
};

/// Fixed category order; rendering and serialization follow it.
inline constexpr std::array<ModifierCategory, 4> kModifierCategories{
    ModifierCategory::ArtisticStyle,
    ModifierCategory::VisualCompositionStructure,
    ModifierCategory::AestheticEmotionalAtmosphere,
    ModifierCategory::MediumMaterial,
};

/// "Artistic Style", "Visual Composition and Structure", ...
std::string_view display_name(ModifierCategory category);

/// Short tag prefix used by the tag-world mock ("style", "comp", "mood", "med").
std::string_view tag_prefix(ModifierCategory category);

/// Case-insensitive lookup. Accepts display names, identifier spellings
/// ("ArtisticStyle", "artistic_style") and the mock tag prefixes.
std::optional<ModifierCategory> parse_category(std::string_view text);

std::string trim(std::string_view text);

/// Appends `phrase` (trimmed) unless it is empty or already present.
bool append_unique(std::vector<std::string>& list, std::string_view phrase);

/// Ordered phrase list per category with set semantics: phrases are trimmed,
/// non-empty and unique within their category; first occurrence wins.
class Modifiers {
public:
    bool add(ModifierCategory category, std::string_view phrase);

    [[nodiscard]] const std::vector<std::string>& at(ModifierCategory category) const {
        return mLists[static_cast<std::size_t>(category)];
    }
    [[nodiscard]] bool contains(ModifierCategory category, std::string_view phrase) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] bool empty() const { return size() == 0; }

    /// Adds every phrase of `other` in category order.
    void merge(const Modifiers& other);

    bool operator==(const Modifiers&) const = default;

private:
    std::array<std::vector<std::string>, 4> mLists;
};

struct ElementTriple {
    std::string subject;
    Modifiers modifiers;
    std::vector<std::string> supplements;

    bool operator==(const ElementTriple&) const = default;
};

inline constexpr std::string_view kSubjectSlot = "[subject]";

/// A prompt template: subject slot followed by categorized modifiers and
/// supplements. Immutable; the identifier is a digest of the content so two
/// structurally equal templates share an id.
class PromptTemplate {
public:
    PromptTemplate();
    PromptTemplate(Modifiers modifiers, std::vector<std::string> supplements);

    [[nodiscard]] const std::string& id() const { return mId; }
    [[nodiscard]] const Modifiers& modifiers() const { return mModifiers; }
    [[nodiscard]] const std::vector<std::string>& supplements() const { return mSupplements; }

    /// Rendering with the "[subject]" marker in place of a subject.
    [[nodiscard]] std::string slot_form() const;

    [[nodiscard]] PromptTemplate without_supplements() const;

    bool operator==(const PromptTemplate&) const = default;

private:
    Modifiers mModifiers;
    std::vector<std::string> mSupplements;
    std::string mId;
};

/// "subject, modifiers (category order), supplements". Throws EmptySubject
/// for a blank subject.
std::string render_template(const PromptTemplate& tmpl, std::string_view subject);

/// Category-qualified phrase keys ("Artistic Style|watercolor",
/// "supplement|soft grain"); the unit of set comparisons between templates.
std::set<std::string> phrase_keys(const PromptTemplate& tmpl);

/// Unqualified phrases of a template.
std::set<std::string> phrase_set(const PromptTemplate& tmpl);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct Individual {
    std::string id;
    PromptTemplate tmpl;
    std::optional<double> fitness;
    int generation = 0;
    std::vector<std::string> parent_ids;

    [[nodiscard]] bool evaluated() const { return fitness.has_value(); }

    bool operator==(const Individual&) const = default;
};

struct Population {
    std::vector<Individual> individuals;
    int generation = 0;

    [[nodiscard]] std::size_t size() const { return individuals.size(); }

    bool operator==(const Population&) const = default;
};

/// Opaque image handle. `uri` is a file path, URL or synthetic id; `data`
/// holds the bytes when they are already in memory.
struct ImageRef {
    std::string uri;
    std::string data;

    bool operator==(const ImageRef&) const = default;
};

/// Image bytes, reading `uri` from disk when `data` is empty.
std::string read_image_bytes(const ImageRef& image);

/// Unit-norm embedding. Construction checks |norm - 1| <= 1e-6.
class EmbeddingVector {
public:
    static constexpr double kNormTolerance = 1e-6;

    explicit EmbeddingVector(std::vector<double> values);

    /// L2-normalizes `values`; throws InvalidArgument on a zero vector.
    static EmbeddingVector normalized(std::vector<double> values);

    [[nodiscard]] std::size_t dim() const { return mValues.size(); }
    [[nodiscard]] std::span<const double> values() const { return mValues; }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> mValues;
};

// JSON forms. Modifiers serialize as an object keyed by display name.
json to_json(const Modifiers& modifiers);
Modifiers modifiers_from_json(const json& j);
json to_json(const ElementTriple& triple);
json to_json(const PromptTemplate& tmpl);
PromptTemplate template_from_json(const json& j);
json to_json(const Individual& individual);
Individual individual_from_json(const json& j);
json to_json(const Population& population);
Population population_from_json(const json& j);

/// First balanced, parseable JSON object embedded in free text.
std::optional<json> find_json_object(std::string_view text);

/// Parses an extraction reply into a triple. MalformedOutput when no JSON
/// object is present; SchemaViolation on missing keys or unknown categories.
ElementTriple parse_triple(std::string_view raw_model_output);

/// Parses a reply of the form {"modifiers": {...}, "supplements": [...]}.
PromptTemplate parse_template(std::string_view raw_model_output);

} // namespace tmplevo
