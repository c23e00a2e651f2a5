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

#ifndef DPFED_FEDERATION_IO_H_
#define DPFED_FEDERATION_IO_H_

#include <iosfwd>
#include <string>

#include "dpfed/problems.h"

namespace dpfed {

// Line-oriented text format. Every number is printed with 17 significant
// digits, so reading a written federation reproduces it bitwise.
//
//   dpfed-federation 1
//   kind quadratic            (quadratic | logistic | mixed)
//   d 3
//   N 2
//   client 0 quadratic
//   A <d*d values, row-major>
//   b <d values>
//   client 1 logistic
//   n <samples>
//   lambda <ridge>
//   Z <n*d values, row-major>
//   y <n values>
//
// Blank lines and lines starting with '#' are ignored.
void WriteFederation(const Federation& federation, std::ostream& out);
Federation ReadFederation(std::istream& in);

// File wrappers. Throw IoError when the file cannot be opened.
void SaveFederation(const Federation& federation, const std::string& path);
Federation LoadFederation(const std::string& path);

}  // namespace dpfed

#endif  // DPFED_FEDERATION_IO_H_
