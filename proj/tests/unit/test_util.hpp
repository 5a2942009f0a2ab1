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

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "emostim/json_io.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("emostim-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Sample MakeSample(std::string id, std::string input, std::vector<std::string> golds,
                         std::optional<std::vector<std::string>> choices = std::nullopt) {
  return Sample{std::move(id), std::move(input), std::move(golds), std::move(choices)};
}

inline TaskSpec MakeTask(std::string id, MatchMode mode, std::vector<Sample> samples,
                         TaskKind kind = TaskKind::kFreeResponse) {
  TaskSpec t;
  t.id = id;
  t.name = id;
  t.kind = kind;
  t.instruction = "Do the task.";
  t.match_mode = mode;
  t.provenance = "test";
  t.samples = std::move(samples);
  return t;
}

// A multiple-choice task of `n` samples, each with `k` choices "c0".."c{k-1}"
// and gold "c0".
inline TaskSpec MakeChoiceTask(std::string id, std::size_t n, std::size_t k) {
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> choices;
    for (std::size_t c = 0; c < k; ++c) choices.push_back("option " + std::to_string(c));
    samples.push_back(MakeSample(std::to_string(i), "question " + std::to_string(i), {choices[0]}, choices));
  }
  return MakeTask(std::move(id), MatchMode::kMultichoice, std::move(samples), TaskKind::kMultipleChoice);
}

inline void WriteJson(const std::filesystem::path& path, const Json& json) {
  std::filesystem::create_directories(path.parent_path());
  WriteFileAtomically(path, json.dump(2));
}

inline std::filesystem::path DataDir() { return EMOSTIM_DATA_DIR; }

}  // namespace emostim::testing
