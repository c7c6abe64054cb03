// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_MODEL_ID_HPP_
#define PORTCHECK_MODEL_ID_HPP_

#include <array>
#include <string_view>

namespace portcheck {

enum class ModelId { SC, TSO, SRA };

inline constexpr std::array<ModelId, 3> kAllModels{ModelId::SC, ModelId::TSO,
                                                   ModelId::SRA};

std::string_view model_name(ModelId m);  // "SC", "TSO", "SRA"
/// Case-insensitive; throws ValidationError on an unknown name.
ModelId parse_model(std::string_view name);

}  // namespace portcheck

#endif  // PORTCHECK_MODEL_ID_HPP_
