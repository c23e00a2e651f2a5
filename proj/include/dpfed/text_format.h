/*
 * Copyright 2026 The dpfed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFED_TEXT_FORMAT_H_
#define DPFED_TEXT_FORMAT_H_

#include <string>
#include <string_view>

namespace dpfed {

// "%.17g": enough digits to round-trip every finite double bitwise.
std::string FormatDouble(double value);

// Parses the whole of `text` as a double ("inf", "nan" accepted). Throws
// InvalidArgument on trailing garbage or an empty string.
double ParseDouble(std::string_view text);
long long ParseInteger(std::string_view text);

std::string_view Trim(std::string_view text);

}  // namespace dpfed

#endif  // DPFED_TEXT_FORMAT_H_
