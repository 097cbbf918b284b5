/*
 * Copyright 2026 The AdaMEL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAMEL_CLI_HPP
#define ADAMEL_CLI_HPP

#include <memory>
#include <string>
#include <vector>

#include "adamel/features.hpp"
#include "adamel/model.hpp"

namespace adamel::cli {

/// Runs one subcommand (train|eval|predict|report|synth|stats). `args`
/// excludes the program name. Returns the process exit code: 0 on success,
/// 2 for usage/precondition errors, 1 for runtime failures. Partial outputs
/// are removed when a command fails.
int run(const std::vector<std::string>& args);

/// Provider selection: an explicit path wins, then the ADAMEL_EMBEDDINGS
/// environment variable, then deterministic hashing vectors.
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& embeddings_path, int embed_dim,
                                                 std::uint64_t seed);

/// Rebuilds the provider a checkpoint was trained with.
std::unique_ptr<EmbeddingProvider> provider_from_checkpoint(const Checkpoint& ckpt);

}  // namespace adamel::cli

#endif  // ADAMEL_CLI_HPP
