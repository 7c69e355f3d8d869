/*
 * Copyright 2026 The qtfuse Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qtfuse/quant_table.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtfuse/error.h"
#include "qtfuse/file_util.h"

namespace qtfuse {

namespace {

constexpr QuantTable::Values kStdLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

constexpr QuantTable::Values kStdChrominance = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,
};

int ClampEntry(long v) { return static_cast<int>(std::clamp(v, 1L, 255L)); }

}  // namespace

std::string_view ComponentKindName(ComponentKind kind) {
  return kind == ComponentKind::kLuminance ? "luminance" : "chrominance";
}

QuantTable::QuantTable(const Values& values, ComponentKind kind)
    : values_(values), kind_(kind) {
  for (size_t i = 0; i < kDctBlockSize; ++i) {
    if (values_[i] < 1 || values_[i] > 255) {
      Fail(ErrorCode::kInvalidArgument,
           "quantization value " + std::to_string(values_[i]) + " at index " +
               std::to_string(i) + " outside [1, 255]");
    }
  }
}

QuantTable QuantTable::Uniform(int value, ComponentKind kind) {
  Values v;
  v.fill(value);
  return QuantTable(v, kind);
}

QualityScale ScaleFactor(int quality) {
  if (quality < 1 || quality > 100) {
    Fail(ErrorCode::kInvalidArgument,
         "quality " + std::to_string(quality) + " outside [1, 100]");
  }
  const int percent = quality < 50 ? 5000 / quality : 200 - quality * 2;
  return {quality, percent};
}

QuantTable ScaleTable(const QuantTable& base, int quality) {
  const int percent = ScaleFactor(quality).scale_percent;
  QuantTable::Values out;
  for (size_t i = 0; i < kDctBlockSize; ++i) {
    out[i] = ClampEntry((static_cast<long>(base[i]) * percent + 50) / 100);
  }
  return QuantTable(out, base.kind());
}

QuantTable UnscaleTable(const QuantTable& scaled, int quality) {
  const int percent = ScaleFactor(quality).scale_percent;
  if (percent == 0) {
    Fail(ErrorCode::kDegenerateScale,
         "quality 100 collapses every entry to 1; the base table is lost");
  }
  QuantTable::Values out;
  for (size_t i = 0; i < kDctBlockSize; ++i) {
    // round(v * 100 / percent), half-up, in integers.
    const long num = static_cast<long>(scaled[i]) * 200 + percent;
    out[i] = ClampEntry(num / (2L * percent));
  }
  return QuantTable(out, scaled.kind());
}

QuantTable RescaleTable(const QuantTable& table, int from_quality,
                        int to_quality) {
  if (from_quality == to_quality) return table;
  return ScaleTable(UnscaleTable(table, from_quality), to_quality);
}

FusionWeights::FusionWeights(std::map<TextureId, double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) Fail(ErrorCode::kInvalidArgument, "no fusion weights");
  double sum = 0.0;
  for (const auto& [id, w] : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument,
           "weight for texture " + std::to_string(id) + " outside [0, 1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "fusion weights sum to " << sum << ", not 1";
    Fail(ErrorCode::kInvalidArgument, msg.str());
  }
}

QuantTable Fuse(const std::map<TextureId, QuantTable>& tables,
                const FusionWeights& weights) {
  if (tables.empty()) Fail(ErrorCode::kInvalidArgument, "no tables to fuse");
  if (tables.size() != weights.size()) {
    Fail(ErrorCode::kInvalidArgument, "weight/table id mismatch");
  }
  const ComponentKind kind = tables.begin()->second.kind();
  std::array<double, kDctBlockSize> acc{};
  for (const auto& [id, w] : weights.weights()) {
    auto it = tables.find(id);
    if (it == tables.end()) {
      Fail(ErrorCode::kInvalidArgument,
           "weight/table id mismatch: no table for texture " +
               std::to_string(id));
    }
    if (it->second.kind() != kind) {
      Fail(ErrorCode::kInvalidArgument, "fused tables differ in component kind");
    }
    for (size_t i = 0; i < kDctBlockSize; ++i) acc[i] += it->second[i] * w;
  }
  QuantTable::Values out;
  for (size_t i = 0; i < kDctBlockSize; ++i) {
    out[i] = ClampEntry(static_cast<long>(std::floor(acc[i] + 0.5)));
  }
  return QuantTable(out, kind);
}

const QuantTable& StandardLuminanceTable() {
  static const QuantTable table(kStdLuminance, ComponentKind::kLuminance);
  return table;
}

const QuantTable& StandardChrominanceTable() {
  static const QuantTable table(kStdChrominance, ComponentKind::kChrominance);
  return table;
}

std::string FormatTable(const TableFile& file) {
  std::ostringstream out;
  out << "qtable " << ComponentKindName(file.table.kind()) << ' '
      << file.quality << '\n';
  for (size_t row = 0; row < 8; ++row) {
    for (size_t col = 0; col < 8; ++col) {
      if (col) out << ' ';
      out << file.table[row * 8 + col];
    }
    out << '\n';
  }
  return out.str();
}

TableFile ParseTable(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic, kind_name;
  int quality = 0;
  if (!(in >> magic >> kind_name >> quality) || magic != "qtable") {
    Fail(ErrorCode::kFormat, "table header must be 'qtable <kind> <quality>'");
  }
  ComponentKind kind;
  if (kind_name == "luminance") {
    kind = ComponentKind::kLuminance;
  } else if (kind_name == "chrominance") {
    kind = ComponentKind::kChrominance;
  } else {
    Fail(ErrorCode::kFormat, "unknown component kind '" + kind_name + "'");
  }
  if (quality < 1 || quality > 100) {
    Fail(ErrorCode::kFormat, "table quality outside [1, 100]");
  }
  QuantTable::Values values;
  for (size_t i = 0; i < kDctBlockSize; ++i) {
    if (!(in >> values[i])) {
      Fail(ErrorCode::kFormat,
           "expected 64 table entries, got " + std::to_string(i));
    }
  }
  std::string extra;
  if (in >> extra) Fail(ErrorCode::kFormat, "trailing data after 64 entries");
  try {
    return {QuantTable(values, kind), quality};
  } catch (const Error& e) {
    Fail(ErrorCode::kFormat, e.what());
  }
}

TableFile ReadTableFile(const std::string& path) {
  try {
    return ParseTable(ReadFileText(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    Fail(ErrorCode::kFormat, path + ": " + e.what());
  }
}

void WriteTableFile(const std::string& path, const TableFile& file) {
  WriteFileText(path, FormatTable(file));
}

std::string FormatWeights(const FusionWeights& weights) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [id, w] : weights.weights()) out << id << ' ' << w << '\n';
  return out.str();
}

FusionWeights ParseWeights(std::string_view text) {
  std::map<TextureId, double> weights;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    TextureId id;
    double w;
    if (!(fields >> id)) continue;
    std::string extra;
    if (!(fields >> w) || (fields >> extra)) {
      Fail(ErrorCode::kFormat,
           "weights line " + std::to_string(line_no) + ": expected 'id weight'");
    }
    if (!weights.emplace(id, w).second) {
      Fail(ErrorCode::kFormat, "duplicate texture id " + std::to_string(id));
    }
  }
  return FusionWeights(std::move(weights));
}

}  // namespace qtfuse
