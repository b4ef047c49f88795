// Copyright 2026 The tepolab Authors.
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

#include "tepo/trajectory_io.hpp"

#include <json.hpp>

#include "tepo/entropy.hpp"
#include "tepo/error.hpp"

namespace tepo {

using nlohmann::json;

namespace {

std::string JoinTexts(const Rollout& r, int begin, int end) {
  std::string out;
  for (int i = begin; i < end; ++i) {
    if (!out.empty()) out += ' ';
    out += r.tokens[static_cast<std::size_t>(i)].text;
  }
  return out;
}

template <typename T>
json OptionalJson(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json CallJson(const Rollout& r, std::size_t index) {
  const ToolCallRecord& c = r.tool_calls[index];
  json j;
  j["k"] = c.k;
  j["tool"] = c.tool;
  j["query"] = JoinTexts(r, c.action_start + 1, c.action_end - 1);
  std::string obs;
  for (const auto& s : r.segments) {
    if (s.kind == SegmentKind::kObservation && s.start == c.action_end) {
      obs = JoinTexts(r, s.start, s.end);
    }
  }
  j["observation"] = obs;
  j["quality_score"] = OptionalJson(c.quality_score);
  j["truthful"] = OptionalJson(c.truthful);
  if (c.entropy_annotated) {
    j["h_pre"] = OptionalJson(c.h_pre);
    j["h_post"] = OptionalJson(c.h_post);
    j["delta"] = c.delta;
    j["ratio"] = OptionalJson(c.ratio);
    j["indicator"] = c.indicator;
    j["degenerate"] = c.degenerate;
  }
  return j;
}

[[noreturn]] void Fail(std::size_t line, const std::string& what) {
  throw ParseError(line, what);
}

template <typename T>
T Get(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) Fail(line, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    Fail(line, std::string("field '") + key + "' has the wrong type");
  }
}

std::optional<double> OptDouble(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) Fail(line, std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

std::string serialize_rollout(const Rollout& r) {
  json j;
  j["schema_version"] = kTrajectorySchemaVersion;
  j["question_id"] = r.question_id;
  j["rollout_id"] = r.rollout_id;
  j["question_key"] = r.question_key;
  j["gold"] = r.gold;
  json tokens = json::array();
  for (const auto& t : r.tokens) {
    json tj;
    tj["pos"] = t.position;
    tj["id"] = t.token_id;
    tj["text"] = t.text;
    if (t.kind != SegmentKind::kObservation) {
      tj["entropy"] = t.entropy;
      tj["logprob_old"] = t.logprob_old;
    }
    tj["kind"] = std::string(SegmentKindName(t.kind));
    tokens.push_back(std::move(tj));
  }
  j["tokens"] = std::move(tokens);
  json calls = json::array();
  for (std::size_t i = 0; i < r.tool_calls.size(); ++i) calls.push_back(CallJson(r, i));
  j["tool_calls"] = std::move(calls);
  std::string answer;
  for (TokenId id : r.answer_tokens) {
    for (const auto& t : r.tokens) {
      if (t.token_id == id) {
        if (!answer.empty()) answer += ' ';
        answer += t.text;
        break;
      }
    }
  }
  j["answer"] = answer;
  j["f1"] = OptionalJson(r.f1);
  j["terminated_by"] = r.terminated_by == Termination::kFinish ? "finish" : "max_steps";
  return j.dump();
}

Rollout parse_rollout(std::string_view line, std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    Fail(line_number, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) Fail(line_number, "expected a JSON object");
  if (auto it = j.find("schema_version"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != kTrajectorySchemaVersion) {
      throw Error(ErrorCode::kSchemaVersionMismatch,
                  "line " + std::to_string(line_number) + ": schema_version " +
                      it->dump() + " is not supported");
    }
  }

  Rollout r;
  r.question_id = Get<std::string>(j, "question_id", line_number);
  r.rollout_id = Get<std::string>(j, "rollout_id", line_number);
  if (auto it = j.find("question_key"); it != j.end() && it->is_number_integer()) {
    r.question_key = it->get<int>();
  }
  if (auto it = j.find("gold"); it != j.end() && it->is_number_integer()) {
    r.gold = it->get<int>();
  }

  const auto tokens = Get<json>(j, "tokens", line_number);
  if (!tokens.is_array()) Fail(line_number, "'tokens' must be an array");
  std::vector<SegmentKind> declared;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const json& tj = tokens[i];
    TokenRecord t;
    t.position = Get<int>(tj, "pos", line_number);
    if (t.position != static_cast<int>(i)) {
      Fail(line_number, "token " + std::to_string(i) + " has pos " +
                            std::to_string(t.position));
    }
    t.token_id = Get<int>(tj, "id", line_number);
    t.text = Get<std::string>(tj, "text", line_number);
    const auto kind = SegmentKindFromName(Get<std::string>(tj, "kind", line_number));
    if (!kind) Fail(line_number, "token " + std::to_string(i) + " has unknown kind");
    t.kind = *kind;
    const auto entropy = OptDouble(tj, "entropy", line_number);
    if (!entropy && t.kind != SegmentKind::kObservation) {
      Fail(line_number, "token " + std::to_string(i) + " is missing its entropy");
    }
    t.entropy = entropy.value_or(0.0);
    t.logprob_old = OptDouble(tj, "logprob_old", line_number).value_or(0.0);
    declared.push_back(t.kind);
    r.tokens.push_back(std::move(t));
  }

  try {
    apply_segmentation(r);
  } catch (const Error& e) {
    Fail(line_number, e.what());
  }
  for (std::size_t i = 0; i < r.tokens.size(); ++i) {
    if (r.tokens[i].kind != declared[i]) {
      Fail(line_number, "token " + std::to_string(i) + " declared as " +
                            std::string(SegmentKindName(declared[i])) +
                            " but segments as " +
                            std::string(SegmentKindName(r.tokens[i].kind)));
    }
  }
  attach_tool_records(r);
  r.answer_tokens = extract_answer(r);

  const auto calls = Get<json>(j, "tool_calls", line_number);
  if (!calls.is_array()) Fail(line_number, "'tool_calls' must be an array");
  if (calls.size() != r.tool_calls.size()) {
    Fail(line_number, "tool_calls lists " + std::to_string(calls.size()) +
                          " calls but the token stream has " +
                          std::to_string(r.tool_calls.size()));
  }
  bool all_stored = !calls.empty();
  for (const json& cj : calls) {
    const int k = Get<int>(cj, "k", line_number);
    if (k < 1 || k > r.num_calls()) Fail(line_number, "tool call k out of range");
    ToolCallRecord& c = r.tool_calls[static_cast<std::size_t>(k - 1)];
    if (auto it = cj.find("quality_score"); it != cj.end() && !it->is_null()) {
      if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1)) {
        Fail(line_number, "quality_score must be 0, 1 or null");
      }
      c.quality_score = it->get<int>();
    }
    if (auto it = cj.find("truthful"); it != cj.end() && it->is_boolean()) {
      c.truthful = it->get<bool>();
    }
    if (cj.contains("delta") && cj.contains("indicator")) {
      c.entropy_annotated = true;
      c.h_pre = OptDouble(cj, "h_pre", line_number);
      c.h_post = OptDouble(cj, "h_post", line_number);
      c.delta = Get<double>(cj, "delta", line_number);
      c.ratio = OptDouble(cj, "ratio", line_number);
      c.indicator = Get<int>(cj, "indicator", line_number);
      c.degenerate = cj.value("degenerate", false);
    } else {
      all_stored = false;
    }
  }
  if (!all_stored) {
    auto scores = r.tool_calls;
    r = annotate_rollout_entropies(std::move(r));
    for (std::size_t i = 0; i < scores.size(); ++i) {
      r.tool_calls[i].quality_score = scores[i].quality_score;
      r.tool_calls[i].truthful = scores[i].truthful;
    }
  }

  r.f1 = OptDouble(j, "f1", line_number);
  const auto term = j.value("terminated_by", std::string("finish"));
  if (term == "finish") {
    r.terminated_by = Termination::kFinish;
  } else if (term == "max_steps") {
    r.terminated_by = Termination::kMaxSteps;
  } else {
    Fail(line_number, "terminated_by must be 'finish' or 'max_steps'");
  }
  return r;
}

std::vector<Rollout> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Rollout> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_rollout(line, line_number));
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, std::span<const Rollout> rollouts) {
  JsonlWriter writer(path);
  for (const auto& r : rollouts) writer.write(r);
  writer.flush();
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

void JsonlWriter::write(const Rollout& rollout) {
  out_ << serialize_rollout(rollout) << '\n';
  if (!out_) throw Error(ErrorCode::kIo, "write failed: " + path_.string());
}

void JsonlWriter::flush() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "write failed: " + path_.string());
}

}  // namespace tepo
