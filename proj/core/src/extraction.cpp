#include "casetl/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

namespace casetl {

namespace {

struct BuiltinEntry {
  std::string_view name;
  std::string_view text;
};

constexpr BuiltinEntry kBuiltins[] = {
#include "builtin_templates.inc"
};

}  // namespace

PromptTemplate PromptTemplate::Create(std::string name, std::string text) {
  std::size_t first = text.find(kBodyPlaceholder);
  if (first == std::string::npos) {
    throw Error(ErrorCode::kInvalidTemplate,
                "template '" + name + "' has no {{BODY}} insertion point");
  }
  if (text.find(kBodyPlaceholder, first + kBodyPlaceholder.size()) != std::string::npos) {
    throw Error(ErrorCode::kInvalidTemplate,
                "template '" + name + "' has more than one {{BODY}} insertion point");
  }
  return PromptTemplate(std::move(name), std::move(text), first);
}

std::string PromptTemplate::Render(std::string_view body) const {
  if (body.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot render '" + name_ + "' with an empty body");
  }
  std::string out;
  out.reserve(text_.size() + body.size());
  out.append(text_, 0, slot_);
  out.append(body);
  out.append(text_, slot_ + kBodyPlaceholder.size());
  return out;
}

std::vector<std::string> BuiltinTemplateNames() {
  std::vector<std::string> names;
  for (const auto& entry : kBuiltins) names.emplace_back(entry.name);
  return names;
}

PromptTemplate BuiltinTemplate(std::string_view name) {
  auto it = std::find_if(std::begin(kBuiltins), std::end(kBuiltins),
                         [&](const BuiltinEntry& e) { return e.name == name; });
  if (it == std::end(kBuiltins)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown template '" + std::string(name) + "'");
  }
  return PromptTemplate::Create(std::string(it->name), std::string(it->text));
}

PromptTemplate LoadTemplateFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read template " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return PromptTemplate::Create(path.stem().string(), text.str());
}

namespace {

std::string Ask(std::string_view task, const CaseDocument& doc,
                const PromptTemplate& prompt, LlmClient& client) {
  return client.Complete({std::string(task), doc.id, prompt.Render(doc.body)});
}

}  // namespace

TimelineExtraction ExtractTimeline(const CaseDocument& doc, const PromptTemplate& prompt,
                                   LlmClient& client) {
  std::string reply = Ask(kTaskTimeline, doc, prompt, client);
  try {
    ParsedTimeline parsed = ParseTimeline(reply);
    parsed.timeline.case_id = doc.id;
    return {std::move(parsed.timeline), std::move(reply), std::move(parsed.source_lines),
            parsed.skipped_lines};
  } catch (const Error& e) {
    throw ExtractionError(e, std::move(reply));
  }
}

DemographicsExtraction ExtractDemographics(const CaseDocument& doc,
                                           const PromptTemplate& prompt,
                                           LlmClient& client) {
  std::string reply = Ask(kTaskDemographics, doc, prompt, client);
  try {
    DemographicsRecord record = ParseDemographics(reply);
    return {doc.id, std::move(record), std::move(reply)};
  } catch (const Error& e) {
    throw ExtractionError(e, std::move(reply));
  }
}

DiagnosesExtraction ExtractDiagnoses(const CaseDocument& doc, const PromptTemplate& prompt,
                                     LlmClient& client) {
  std::string reply = Ask(kTaskDiagnoses, doc, prompt, client);
  try {
    DiagnosisList list = ParseDiagnoses(reply);
    list.case_id = doc.id;
    return {std::move(list), std::move(reply)};
  } catch (const Error& e) {
    throw ExtractionError(e, std::move(reply));
  }
}

}  // namespace casetl
