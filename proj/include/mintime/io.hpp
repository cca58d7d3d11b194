// Copyright 2026 The mintime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MINTIME_IO_HPP_
#define MINTIME_IO_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mintime/hjbsolve.hpp"
#include "mintime/types.hpp"

namespace mintime {

/// Stamped into every emitted JSON object.
inline constexpr const char* kSchemaVersion = "mintime/1";

/// Shortest round-trip decimal with "." separator; +-inf as "inf"/"-inf".
std::string format_number(double v);

Vec vec_from_json(const nlohmann::json& j);
nlohmann::json vec_to_json(const Vec& v);
Mat mat_from_json(const nlohmann::json& j);
nlohmann::json mat_to_json(const Mat& m);

nlohmann::json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);

/// A single body document or an array of them.
nlohmann::json target_to_json(const TargetSet& target);
TargetSet target_from_json(const nlohmann::json& j);

nlohmann::json box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j);

/// Header: coordinates x1..xn, then T. Unreachable nodes print "inf".
void write_field_csv(std::ostream& os, const ValueField& field);

/// Grid, residual, sweeps and step of a solved field.
nlohmann::json field_header(const ValueField& field);

/// Copies `j` with non-finite numbers replaced by "inf", "-inf" or "nan" and
/// "schema" set at the top level.
nlohmann::json stamp(const nlohmann::json& j);

/// One stamped object per line.
void write_jsonl(std::ostream& os, const nlohmann::json& j);

/// Skips blank lines; throws ConfigError on malformed lines.
std::vector<nlohmann::json> read_jsonl(std::istream& is);

/// Reads a JSON document from a file; ConfigError on I/O or parse failure.
nlohmann::json read_json_file(const std::string& path);

}  // namespace mintime

#endif  // MINTIME_IO_HPP_
