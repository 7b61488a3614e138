// Copyright (c) 2026, The tmplevo Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "tmplevo/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmplevo/error.hpp"
#include "tmplevo/hashing.hpp"

namespace tmplevo {

namespace {

std::string normalize_key(std::string_view text) {
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> rendered_parts(const PromptTemplate& tmpl, std::string_view head) {
    std::vector<std::string> parts{std::string(head)};
    for (auto c : kModifierCategories) {
        for (const auto& p : tmpl.modifiers().at(c)) parts.push_back(p);
    }
    for (const auto& s : tmpl.supplements()) parts.push_back(s);
    return parts;
}

std::vector<std::string> string_list(const json& j, std::string_view what) {
    if (!j.is_array()) fail(ErrorKind::SchemaViolation, std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string()) {
            fail(ErrorKind::SchemaViolation, std::string(what) + " entries must be strings");
        }
        append_unique(out, item.get<std::string>());
    }
    return out;
}

} // namespace

std::string_view display_name(ModifierCategory category) {
    switch (category) {
        case ModifierCategory::ArtisticStyle: return "Artistic Style";
        case ModifierCategory::VisualCompositionStructure: return "Visual Composition and Structure";
        case ModifierCategory::AestheticEmotionalAtmosphere: return "Aesthetic and Emotional Atmosphere";
        case ModifierCategory::MediumMaterial: return "Medium and Material";
    }
    return "";
}

std::string_view tag_prefix(ModifierCategory category) {
    switch (category) {
        case ModifierCategory::ArtisticStyle: return "style";
        case ModifierCategory::VisualCompositionStructure: return "comp";
        case ModifierCategory::AestheticEmotionalAtmosphere: return "mood";
        case ModifierCategory::MediumMaterial: return "med";
    }
    return "";
}

std::optional<ModifierCategory> parse_category(std::string_view text) {
    static constexpr std::array<std::string_view, 4> kIdentifiers{
        "artisticstyle", "visualcompositionstructure", "aestheticemotionalatmosphere", "mediummaterial"};
    const std::string key = normalize_key(text);
    for (auto c : kModifierCategories) {
        const auto i = static_cast<std::size_t>(c);
        if (key == normalize_key(display_name(c)) || key == kIdentifiers[i] || key == tag_prefix(c)) {
            return c;
        }
    }
    return std::nullopt;
}

std::string trim(std::string_view text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return std::string(text);
}

bool append_unique(std::vector<std::string>& list, std::string_view phrase) {
    std::string p = trim(phrase);
    if (p.empty() || std::find(list.begin(), list.end(), p) != list.end()) return false;
    list.push_back(std::move(p));
    return true;
}

bool Modifiers::add(ModifierCategory category, std::string_view phrase) {
    return append_unique(mLists[static_cast<std::size_t>(category)], phrase);
}

bool Modifiers::contains(ModifierCategory category, std::string_view phrase) const {
    const auto& list = at(category);
    return std::find(list.begin(), list.end(), phrase) != list.end();
}

std::size_t Modifiers::size() const {
    std::size_t n = 0;
    for (const auto& l : mLists) n += l.size();
    return n;
}

void Modifiers::merge(const Modifiers& other) {
    for (auto c : kModifierCategories) {
        for (const auto& p : other.at(c)) add(c, p);
    }
}

PromptTemplate::PromptTemplate() : PromptTemplate(Modifiers{}, {}) {}

PromptTemplate::PromptTemplate(Modifiers modifiers, std::vector<std::string> supplements)
    : mModifiers(std::move(modifiers)) {
    for (const auto& s : supplements) append_unique(mSupplements, s);
    mId = "tpl-" + digest(slot_form());
}

std::string PromptTemplate::slot_form() const {
    return join(rendered_parts(*this, kSubjectSlot), ", ");
}

PromptTemplate PromptTemplate::without_supplements() const {
    return PromptTemplate(mModifiers, {});
}

std::string render_template(const PromptTemplate& tmpl, std::string_view subject) {
    std::string s = trim(subject);
    if (s.empty()) fail(ErrorKind::EmptySubject, "subject must be non-empty");
    if (s.find(kSubjectSlot) != std::string::npos) {
        fail(ErrorKind::InvalidArgument, "subject must not contain the slot marker");
    }
    return join(rendered_parts(tmpl, s), ", ");
}

std::set<std::string> phrase_keys(const PromptTemplate& tmpl) {
    std::set<std::string> keys;
    for (auto c : kModifierCategories) {
        for (const auto& p : tmpl.modifiers().at(c)) keys.insert(std::string(display_name(c)) + "|" + p);
    }
    for (const auto& s : tmpl.supplements()) keys.insert("supplement|" + s);
    return keys;
}

std::set<std::string> phrase_set(const PromptTemplate& tmpl) {
    std::set<std::string> out;
    for (auto c : kModifierCategories) {
        for (const auto& p : tmpl.modifiers().at(c)) out.insert(p);
    }
    for (const auto& s : tmpl.supplements()) out.insert(s);
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::string read_image_bytes(const ImageRef& image) {
    if (!image.data.empty()) return image.data;
    std::ifstream in(image.uri, std::ios::binary);
    if (!in) fail(ErrorKind::InputError, "cannot read image: " + image.uri);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : mValues(std::move(values)) {
    if (mValues.empty()) fail(ErrorKind::InvalidArgument, "embedding must have positive dimension");
    double sq = 0.0;
    for (double v : mValues) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > kNormTolerance) {
        fail(ErrorKind::InvalidArgument, "embedding is not unit-norm");
    }
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (sq <= 0.0) fail(ErrorKind::InvalidArgument, "cannot normalize a zero vector");
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : values) v *= inv;
    return EmbeddingVector(std::move(values));
}

json to_json(const Modifiers& modifiers) {
    json j = json::object();
    for (auto c : kModifierCategories) {
        if (!modifiers.at(c).empty()) j[std::string(display_name(c))] = modifiers.at(c);
    }
    return j;
}

Modifiers modifiers_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorKind::SchemaViolation, "modifiers must be an object");
    Modifiers m;
    // Walk categories in fixed order so equal content yields equal objects
    // regardless of key order in the source text.
    std::array<std::optional<std::vector<std::string>>, 4> lists;
    for (const auto& [key, value] : j.items()) {
        const auto category = parse_category(key);
        if (!category) fail(ErrorKind::SchemaViolation, "unknown modifier category '" + key + "'");
        auto& slot = lists[static_cast<std::size_t>(*category)];
        if (!slot) slot.emplace();
        for (auto& p : string_list(value, "modifier list")) append_unique(*slot, p);
    }
    for (auto c : kModifierCategories) {
        if (const auto& l = lists[static_cast<std::size_t>(c)]) {
            for (const auto& p : *l) m.add(c, p);
        }
    }
    return m;
}

json to_json(const ElementTriple& triple) {
    return json{{"subject", triple.subject},
                {"modifiers", to_json(triple.modifiers)},
                {"supplements", triple.supplements}};
}

json to_json(const PromptTemplate& tmpl) {
    return json{{"id", tmpl.id()},
                {"modifiers", to_json(tmpl.modifiers())},
                {"supplements", tmpl.supplements()}};
}

PromptTemplate template_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorKind::SchemaViolation, "template must be an object");
    if (!j.contains("modifiers")) fail(ErrorKind::SchemaViolation, "template missing 'modifiers'");
    if (!j.contains("supplements")) fail(ErrorKind::SchemaViolation, "template missing 'supplements'");
    PromptTemplate t(modifiers_from_json(j.at("modifiers")), string_list(j.at("supplements"), "supplements"));
    if (j.contains("id") && j.at("id") != t.id()) {
        fail(ErrorKind::SchemaViolation, "template id does not match its content");
    }
    return t;
}

json to_json(const Individual& individual) {
    return json{{"id", individual.id},
                {"template", to_json(individual.tmpl)},
                {"fitness", individual.fitness ? json(*individual.fitness) : json(nullptr)},
                {"generation", individual.generation},
                {"parent_ids", individual.parent_ids}};
}

Individual individual_from_json(const json& j) {
    Individual ind;
    ind.id = j.at("id").get<std::string>();
    ind.tmpl = template_from_json(j.at("template"));
    if (!j.at("fitness").is_null()) ind.fitness = j.at("fitness").get<double>();
    ind.generation = j.at("generation").get<int>();
    ind.parent_ids = j.at("parent_ids").get<std::vector<std::string>>();
    if (ind.generation < 0) fail(ErrorKind::SchemaViolation, "negative generation");
    return ind;
}

json to_json(const Population& population) {
    json inds = json::array();
    for (const auto& i : population.individuals) inds.push_back(to_json(i));
    return json{{"generation", population.generation}, {"individuals", inds}};
}

Population population_from_json(const json& j) {
    Population p;
    p.generation = j.at("generation").get<int>();
    for (const auto& i : j.at("individuals")) p.individuals.push_back(individual_from_json(i));
    return p;
}

std::optional<json> find_json_object(std::string_view text) {
    for (std::size_t start = text.find('{'); start != std::string_view::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}' && --depth == 0) {
                json j = json::parse(text.substr(start, i - start + 1), nullptr, false);
                if (!j.is_discarded() && j.is_object()) return j;
                break;
            }
        }
    }
    return std::nullopt;
}

ElementTriple parse_triple(std::string_view raw_model_output) {
    const auto j = find_json_object(raw_model_output);
    if (!j) fail(ErrorKind::MalformedOutput, "no JSON object found in model output");
    for (const char* key : {"subject", "modifiers", "supplements"}) {
        if (!j->contains(key)) fail(ErrorKind::SchemaViolation, std::string("missing key '") + key + "'");
    }
    if (!j->at("subject").is_string()) fail(ErrorKind::SchemaViolation, "subject must be a string");
    ElementTriple t;
    t.subject = trim(j->at("subject").get<std::string>());
    t.modifiers = modifiers_from_json(j->at("modifiers"));
    t.supplements = string_list(j->at("supplements"), "supplements");
    return t;
}

PromptTemplate parse_template(std::string_view raw_model_output) {
    const auto j = find_json_object(raw_model_output);
    if (!j) fail(ErrorKind::MalformedOutput, "no JSON object found in model output");
    json content = *j;
    content.erase("id");
    return template_from_json(content);
}

} // namespace tmplevo
