// Copyright 2026 The emostim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emostim/prompt_transforms.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "emostim/error.hpp"

namespace emostim {

namespace {

constexpr std::pair<Theory, std::string_view> kTheories[] = {
    {Theory::kSelfMonitoring, "self_monitoring"},
    {Theory::kSocialCognitive, "social_cognitive"},
    {Theory::kCognitiveEmotionRegulation, "cognitive_emotion_regulation"},
    {Theory::kCompound, "compound"},
};

constexpr std::pair<StimulusCategory, std::string_view> kCategories[] = {
    {StimulusCategory::kSocialInfluence, "social_influence"},
    {StimulusCategory::kSelfEsteemMotivation, "self_esteem_motivation"},
};

constexpr std::pair<TransformKind, std::string_view> kTransformKinds[] = {
    {TransformKind::kVanilla, "vanilla"},
    {TransformKind::kStimulusList, "stimulus_list"},
    {TransformKind::kCot, "cot"},
    {TransformKind::kCustomSuffix, "custom_suffix"},
    {TransformKind::kAlternatePrompt, "alternate_prompt"},
};

template <typename E, std::size_t N>
std::string_view NameOf(E value, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
E ValueOf(std::string_view text, const std::pair<E, std::string_view> (&table)[N],
          std::string_view what) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

std::vector<std::string> SplitPlus(std::string_view spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = spec.find('+', start);
    parts.emplace_back(spec.substr(start, pos == std::string_view::npos ? spec.size() - start
                                                                         : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string JoinPlus(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += '+';
    out += id;
  }
  return out;
}

void CheckStimulusList(const std::vector<std::string>& ids, const StimulusLibrary& library,
                       bool allow_empty) {
  if (ids.empty() && !allow_empty) {
    throw ValidationError("", "stimuli", "stimulus list must not be empty");
  }
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("", "stimuli", "duplicate stimulus id '" + id + "'");
    }
    if (library.Find(id) == nullptr) {
      throw ValidationError("", "stimuli", "unknown stimulus id '" + id + "'");
    }
  }
}

}  // namespace

std::string_view ToString(Theory theory) { return NameOf(theory, kTheories); }
std::string_view ToString(StimulusCategory category) { return NameOf(category, kCategories); }
std::string_view ToString(TransformKind kind) { return NameOf(kind, kTransformKinds); }
Theory ParseTheory(std::string_view text) { return ValueOf(text, kTheories, "theory"); }
StimulusCategory ParseStimulusCategory(std::string_view text) {
  return ValueOf(text, kCategories, "stimulus category");
}

std::vector<Stimulus> BuiltinStimuli() {
  using T = Theory;
  using C = StimulusCategory;
  // EP01 is stored as a standalone sentence; the attention table renders it
  // glued to the prompt with a comma ("negative., write your answer ...").
  return {
      {"EP01", "Write your answer and give me a confidence score between 0-1 for your answer.",
       {T::kSelfMonitoring}, C::kSocialInfluence},
      {"EP02", "This is very important to my career.", {T::kSelfMonitoring}, C::kSocialInfluence},
      {"EP03", "You'd better be sure.",
       {T::kSelfMonitoring, T::kCognitiveEmotionRegulation}, C::kSocialInfluence},
      {"EP04", "Are you sure?", {T::kSelfMonitoring, T::kCognitiveEmotionRegulation},
       C::kSocialInfluence},
      {"EP05", "Are you sure that's your final answer? It might be worth taking another look.",
       {T::kSelfMonitoring, T::kCognitiveEmotionRegulation}, C::kSocialInfluence},
      {"EP06",
       "Provide your answer and a confidence score between 0-1 for your prediction. "
       "Additionally, briefly explain the main reasons supporting your classification "
       "decision to help me understand your thought process. This task is vital to my "
       "career, and I greatly value your thorough analysis.",
       {T::kCompound}, C::kSocialInfluence},
      {"EP07",
       "Are you sure that's your final answer? Believe in your abilities and strive for "
       "excellence. Your hard work will yield remarkable results.",
       {T::kSocialCognitive, T::kCognitiveEmotionRegulation}, C::kSelfEsteemMotivation},
      {"EP08",
       "Embrace challenges as opportunities for growth. Each obstacle you overcome brings you "
       "closer to success.",
       {T::kSocialCognitive}, C::kSelfEsteemMotivation},
      {"EP09",
       "Stay focused and dedicated to your goals. Your consistent efforts will lead to "
       "outstanding achievements.",
       {T::kSocialCognitive}, C::kSelfEsteemMotivation},
      {"EP10",
       "Take pride in your work and give it your best. Your commitment to excellence sets you "
       "apart.",
       {T::kSocialCognitive}, C::kSelfEsteemMotivation},
      {"EP11",
       "Remember that progress is made one step at a time. Stay determined and keep moving "
       "forward.",
       {T::kSocialCognitive}, C::kSelfEsteemMotivation},
  };
}

StimulusLibrary::StimulusLibrary(std::vector<Stimulus> stimuli) : stimuli_(std::move(stimuli)) {
  std::set<std::string> ids;
  for (const auto& s : stimuli_) {
    if (s.id.empty()) throw ValidationError("", "id", "stimulus id must not be empty");
    if (s.text.empty()) throw ValidationError("", s.id, "stimulus text must not be empty");
    if (!ids.insert(s.id).second) {
      throw ValidationError("", "id", "duplicate stimulus id '" + s.id + "'");
    }
  }
  std::sort(stimuli_.begin(), stimuli_.end(),
            [](const Stimulus& a, const Stimulus& b) { return a.id < b.id; });
}

const StimulusLibrary& StimulusLibrary::Builtin() {
  static const StimulusLibrary library(BuiltinStimuli());
  return library;
}

StimulusLibrary StimulusLibrary::FromJson(const Json& json, const std::string& source) {
  if (!json.is_array()) throw ValidationError(source, "", "expected an array of stimuli");
  std::vector<Stimulus> out;
  for (std::size_t i = 0; i < json.size(); ++i) {
    JsonFields f(json[i], source, "[" + std::to_string(i) + "]");
    Stimulus s;
    s.id = f.RequireNonEmptyString("id");
    s.text = f.RequireNonEmptyString("text");
    const Json& theory = f.Require("theory");
    try {
      if (theory.is_string()) {
        s.theories.push_back(ParseTheory(theory.get<std::string>()));
      } else if (theory.is_array()) {
        for (const auto& t : theory) {
          if (!t.is_string()) f.Fail("theory", "expected strings");
          s.theories.push_back(ParseTheory(t.get<std::string>()));
        }
      } else {
        f.Fail("theory", "expected a string or an array of strings");
      }
      s.category = ParseStimulusCategory(f.RequireString("category"));
    } catch (const ValidationError& e) {
      if (!e.file().empty()) throw;
      f.Fail("theory", e.reason());
    }
    if (s.theories.empty()) f.Fail("theory", "at least one theory required");
    out.push_back(std::move(s));
  }
  try {
    return StimulusLibrary(std::move(out));
  } catch (const ValidationError& e) {
    throw ValidationError(source, e.field(), e.reason());
  }
}

StimulusLibrary StimulusLibrary::Load(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path), path.string());
}

const Stimulus* StimulusLibrary::Find(std::string_view id) const {
  for (const auto& s : stimuli_) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Stimulus& StimulusLibrary::At(std::string_view id) const {
  const Stimulus* s = Find(id);
  if (s == nullptr) throw ValidationError("", "stimuli", "unknown stimulus id '" + std::string(id) + "'");
  return *s;
}

std::vector<std::string> StimulusLibrary::Ids() const {
  std::vector<std::string> ids;
  for (const auto& s : stimuli_) ids.push_back(s.id);
  return ids;
}

Json StimuliToJson(const std::vector<Stimulus>& stimuli) {
  Json out = Json::array();
  for (const auto& s : stimuli) {
    Json theories = Json::array();
    for (Theory t : s.theories) theories.push_back(ToString(t));
    out.push_back({{"id", s.id},
                   {"text", s.text},
                   {"theory", std::move(theories)},
                   {"category", ToString(s.category)}});
  }
  return out;
}

std::string Transform::Id() const {
  switch (kind) {
    case TransformKind::kVanilla:
      return "vanilla";
    case TransformKind::kCot:
      return "cot";
    case TransformKind::kStimulusList:
      return JoinPlus(stimuli);
    case TransformKind::kCustomSuffix:
      return "suffix:" + source;
    case TransformKind::kAlternatePrompt: {
      std::string id = source;
      if (!stimuli.empty()) id += "+" + JoinPlus(stimuli);
      if (append_cot) id += "+cot";
      return id;
    }
  }
  return "?";
}

bool Transform::IsSingleStimulus() const {
  return kind == TransformKind::kStimulusList && stimuli.size() == 1;
}

Transform Transform::Vanilla() { return {}; }

Transform Transform::ChainOfThought() {
  Transform t;
  t.kind = TransformKind::kCot;
  return t;
}

Transform Transform::Stimuli(std::vector<std::string> ids) {
  Transform t;
  t.kind = TransformKind::kStimulusList;
  t.stimuli = std::move(ids);
  return t;
}

Transform Transform::CustomSuffix(std::string label, std::string suffix) {
  Transform t;
  t.kind = TransformKind::kCustomSuffix;
  t.source = std::move(label);
  t.suffix = std::move(suffix);
  return t;
}

Transform Transform::Alternate(std::string source, std::vector<std::string> stimuli,
                               bool append_cot, std::string prompt_override) {
  Transform t;
  t.kind = TransformKind::kAlternatePrompt;
  t.source = std::move(source);
  t.stimuli = std::move(stimuli);
  t.append_cot = append_cot;
  t.prompt_override = std::move(prompt_override);
  return t;
}

void ValidateTransform(const Transform& t, const StimulusLibrary& library) {
  const bool has_payload = !t.stimuli.empty() || !t.suffix.empty() ||
                           !t.prompt_override.empty() || !t.source.empty() || t.append_cot;
  switch (t.kind) {
    case TransformKind::kVanilla:
    case TransformKind::kCot:
      if (has_payload) {
        throw ValidationError("", "transform", std::string(ToString(t.kind)) +
                                                   " transforms carry no payload");
      }
      break;
    case TransformKind::kStimulusList:
      if (!t.suffix.empty() || !t.prompt_override.empty() || t.append_cot) {
        throw ValidationError("", "transform", "stimulus_list carries only stimulus ids");
      }
      CheckStimulusList(t.stimuli, library, /*allow_empty=*/false);
      break;
    case TransformKind::kCustomSuffix:
      if (t.suffix.empty()) throw ValidationError("", "suffix", "custom suffix must not be empty");
      if (!t.stimuli.empty() || !t.prompt_override.empty() || t.append_cot) {
        throw ValidationError("", "transform", "custom_suffix carries only a suffix");
      }
      break;
    case TransformKind::kAlternatePrompt:
      if (t.source.empty()) {
        throw ValidationError("", "source", "alternate prompt needs a source name");
      }
      if (!t.suffix.empty()) throw ValidationError("", "suffix", "alternate prompt takes no suffix");
      CheckStimulusList(t.stimuli, library, /*allow_empty=*/true);
      break;
  }
}

namespace {

bool LooksLikeStimulusId(std::string_view token, const StimulusLibrary& library) {
  return library.Find(token) != nullptr ||
         (token.size() == 4 && token.substr(0, 2) == "EP" && std::isdigit(static_cast<unsigned char>(token[2])) &&
          std::isdigit(static_cast<unsigned char>(token[3])));
}

}  // namespace

Transform ParseTransform(std::string_view spec) {
  if (spec.empty()) throw ValidationError("", "transform", "empty transform spec");
  if (spec == "vanilla") return Transform::Vanilla();
  if (spec == "cot") return Transform::ChainOfThought();
  if (spec.rfind("suffix:", 0) == 0) {
    const std::string text(spec.substr(7));
    return Transform::CustomSuffix(text, text);
  }
  const StimulusLibrary& library = StimulusLibrary::Builtin();
  std::vector<std::string> parts = SplitPlus(spec);
  for (const auto& p : parts) {
    if (p.empty()) {
      throw ValidationError("", "transform", "malformed transform '" + std::string(spec) + "'");
    }
  }
  if (LooksLikeStimulusId(parts.front(), library)) {
    return Transform::Stimuli(std::move(parts));
  }
  // Anything else names an alternate prompt family, optionally followed by
  // stimuli and/or "cot".
  Transform t = Transform::Alternate(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "cot") {
      if (t.append_cot) throw ValidationError("", "transform", "cot given twice");
      t.append_cot = true;
    } else {
      if (t.append_cot) {
        throw ValidationError("", "transform", "cot must come after all stimuli");
      }
      t.stimuli.push_back(parts[i]);
    }
  }
  return t;
}

Transform TransformFromJson(const Json& json, const std::string& source) {
  if (json.is_string()) {
    try {
      return ParseTransform(json.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(source, "transforms", e.reason());
    }
  }
  JsonFields f(json, source, "transform");
  Transform t;
  try {
    t.kind = ValueOf(f.RequireString("kind"), kTransformKinds, "transform kind");
  } catch (const ValidationError& e) {
    if (!e.file().empty()) throw;
    f.Fail("kind", e.reason());
  }
  t.stimuli = f.OptionalStringArray("stimuli").value_or(std::vector<std::string>{});
  t.suffix = f.OptionalString("suffix").value_or("");
  t.prompt_override = f.OptionalString("prompt_override").value_or("");
  t.source = f.OptionalString("source").value_or(f.OptionalString("name").value_or(""));
  if (f.Has("cot")) {
    const Json& cot = f.Require("cot");
    if (!cot.is_boolean()) f.Fail("cot", "expected a boolean");
    t.append_cot = cot.get<bool>();
  }
  if (t.kind == TransformKind::kCustomSuffix && t.source.empty()) t.source = t.suffix;
  return t;
}

Json TransformToJson(const Transform& t) {
  Json j = {{"kind", ToString(t.kind)}, {"id", t.Id()}};
  if (!t.stimuli.empty()) j["stimuli"] = t.stimuli;
  if (!t.suffix.empty()) j["suffix"] = t.suffix;
  if (!t.prompt_override.empty()) j["prompt_override"] = t.prompt_override;
  if (!t.source.empty()) j["source"] = t.source;
  if (t.append_cot) j["cot"] = true;
  return j;
}

RenderedPrompt Compose(std::string_view base_prompt, const Transform& transform,
                       const StimulusLibrary& library) {
  if (base_prompt.empty()) throw ValidationError("", "base_prompt", "base prompt must not be empty");
  ValidateTransform(transform, library);

  RenderedPrompt out;
  out.transform_id = transform.Id();
  out.base_prompt = std::string(base_prompt);
  if (transform.kind == TransformKind::kAlternatePrompt) {
    if (transform.prompt_override.empty()) {
      throw ValidationError("", "prompt_override",
                            "alternate prompt '" + transform.source + "' has no prompt text");
    }
    out.base_prompt = transform.prompt_override;
  }
  out.text = out.base_prompt;
  for (const auto& id : transform.stimuli) {
    out.text += ' ';
    out.text += library.At(id).text;
  }
  if (transform.kind == TransformKind::kCot || transform.append_cot) {
    out.text += kChainOfThoughtSuffix;
  }
  if (transform.kind == TransformKind::kCustomSuffix) {
    out.text += ' ';
    out.text += transform.suffix;
  }
  return out;
}

std::string RenderFewShot(const RenderedPrompt& rendered, std::span<const Demonstration> demos,
                          std::string_view query_input, const IoFormat& format) {
  std::string out = rendered.text;
  for (const Demonstration& d : demos) {
    out += format.block_separator;
    out += format.input_label;
    out += d.input;
    out += format.separator;
    out += format.output_label;
    out += d.output;
  }
  out += format.block_separator;
  out += format.input_label;
  out += query_input;
  out += format.separator;
  out += format.output_label;
  return out;
}

std::vector<Transform> CombinationCatalog(const std::vector<std::vector<std::string>>& tuples,
                                          const StimulusLibrary& library) {
  std::vector<Transform> out;
  out.reserve(tuples.size());
  for (const auto& tuple : tuples) {
    if (tuple.size() < 2 || tuple.size() > 3) {
      throw ValidationError("", "combination", "combinations must have 2 or 3 stimuli, got " +
                                                   std::to_string(tuple.size()));
    }
    CheckStimulusList(tuple, library, /*allow_empty=*/false);
    out.push_back(Transform::Stimuli(tuple));
  }
  return out;
}

std::vector<Transform> DefaultCombinationCatalog() {
  return CombinationCatalog({
      {"EP01", "EP02"},
      {"EP01", "EP03"},
      {"EP01", "EP04"},
      {"EP01", "EP05"},
      {"EP02", "EP03"},
      {"EP02", "EP08"},
      {"EP02", "EP09"},
      {"EP04", "EP06"},
      {"EP04", "EP07"},
      {"EP04", "EP08"},
      {"EP04", "EP09"},
      {"EP01", "EP04", "EP06"},
      {"EP01", "EP04", "EP07"},
      {"EP01", "EP04", "EP08"},
      {"EP01", "EP04", "EP09"},
  });
}

}  // namespace emostim
