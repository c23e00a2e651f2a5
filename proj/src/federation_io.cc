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

#include "dpfed/federation_io.h"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpfed/errors.h"
#include "dpfed/text_format.h"

namespace dpfed {
namespace {

constexpr const char* kMagic = "dpfed-federation";

void WriteValues(std::ostream& out, const char* key, const double* data,
                 Eigen::Index count) {
  out << key;
  for (Eigen::Index i = 0; i < count; ++i) out << ' ' << FormatDouble(data[i]);
  out << '\n';
}

void WriteRowMajor(std::ostream& out, const char* key, const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      row_major = m;
  WriteValues(out, key, row_major.data(), row_major.size());
}

// Splits the stream into non-comment lines of whitespace-separated tokens.
class TokenLines {
 public:
  explicit TokenLines(std::istream& in) : in_(in) {}

  // Next non-empty line; throws InvalidArgument at end of input.
  std::vector<std::string> Next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_number_;
      const auto trimmed = Trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      std::istringstream tokens{std::string(trimmed)};
      std::vector<std::string> out;
      for (std::string tok; tokens >> tok;) out.push_back(tok);
      return out;
    }
    throw InvalidArgument("federation file: unexpected end of input");
  }

  // Next line, which must start with `key` and carry `count` values.
  std::vector<double> Expect(const std::string& key, Eigen::Index count) {
    const auto tokens = Next();
    if (tokens.empty() || tokens[0] != key) {
      Fail("expected key '" + key + "'");
    }
    if (static_cast<Eigen::Index>(tokens.size()) - 1 != count) {
      Fail("key '" + key + "' expects " + std::to_string(count) +
           " values, got " + std::to_string(tokens.size() - 1));
    }
    std::vector<double> values;
    values.reserve(count);
    for (size_t i = 1; i < tokens.size(); ++i) {
      values.push_back(ParseDouble(tokens[i]));
    }
    return values;
  }

  long long ExpectInteger(const std::string& key) {
    const auto tokens = Next();
    if (tokens.size() != 2 || tokens[0] != key) {
      Fail("expected '" + key + " <integer>'");
    }
    return ParseInteger(tokens[1]);
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw InvalidArgument("federation file line " +
                          std::to_string(line_number_) + ": " + message);
  }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

Matrix FromRowMajor(const std::vector<double>& values, Eigen::Index rows,
                    Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return m;
}

Vector ToVector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Eigen::Index>(values.size()));
}

}  // namespace

void WriteFederation(const Federation& federation, std::ostream& out) {
  bool any_quadratic = false;
  bool any_logistic = false;
  for (const auto& c : federation.clients()) {
    (c.kind() == ObjectiveKind::kQuadratic ? any_quadratic : any_logistic) =
        true;
  }
  const char* kind = any_quadratic && any_logistic
                         ? "mixed"
                         : (any_quadratic ? "quadratic" : "logistic");
  out << kMagic << " 1\n";
  out << "kind " << kind << '\n';
  out << "d " << federation.dimension() << '\n';
  out << "N " << federation.num_clients() << '\n';
  for (int i = 0; i < federation.num_clients(); ++i) {
    const auto& c = federation.client(i);
    out << "client " << i << ' ' << ObjectiveKindName(c.kind()) << '\n';
    if (c.kind() == ObjectiveKind::kQuadratic) {
      WriteRowMajor(out, "A", c.hessian());
      WriteValues(out, "b", c.linear_term().data(), c.linear_term().size());
    } else {
      out << "n " << c.num_samples() << '\n';
      out << "lambda " << FormatDouble(c.ridge()) << '\n';
      WriteRowMajor(out, "Z", c.features());
      WriteValues(out, "y", c.labels().data(), c.labels().size());
    }
  }
}

Federation ReadFederation(std::istream& in) {
  TokenLines lines(in);
  const auto header = lines.Next();
  if (header.size() != 2 || header[0] != kMagic || header[1] != "1") {
    lines.Fail("missing 'dpfed-federation 1' header");
  }
  const auto kind_line = lines.Next();
  if (kind_line.size() != 2 || kind_line[0] != "kind" ||
      (kind_line[1] != "quadratic" && kind_line[1] != "logistic" &&
       kind_line[1] != "mixed")) {
    lines.Fail("expected 'kind quadratic|logistic|mixed'");
  }
  const long long d = lines.ExpectInteger("d");
  const long long n_clients = lines.ExpectInteger("N");
  if (d < 1 || n_clients < 1) lines.Fail("d and N must be >= 1");

  std::vector<ClientObjective> clients;
  for (long long i = 0; i < n_clients; ++i) {
    const auto client_line = lines.Next();
    if (client_line.size() != 3 || client_line[0] != "client" ||
        ParseInteger(client_line[1]) != i) {
      lines.Fail("expected 'client " + std::to_string(i) + " <kind>'");
    }
    if (client_line[2] == "quadratic") {
      const auto a = lines.Expect("A", d * d);
      const auto b = lines.Expect("b", d);
      clients.push_back(
          ClientObjective::Quadratic(FromRowMajor(a, d, d), ToVector(b)));
    } else if (client_line[2] == "logistic") {
      const long long n = lines.ExpectInteger("n");
      if (n < 1) lines.Fail("n must be >= 1");
      const double ridge = lines.Expect("lambda", 1)[0];
      const auto z = lines.Expect("Z", n * d);
      const auto y = lines.Expect("y", n);
      clients.push_back(ClientObjective::Logistic(FromRowMajor(z, n, d),
                                                  ToVector(y), ridge));
    } else {
      lines.Fail("unknown client kind '" + client_line[2] + "'");
    }
  }
  return Federation(std::move(clients));
}

void SaveFederation(const Federation& federation, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WriteFederation(federation, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

Federation LoadFederation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadFederation(in);
}

}  // namespace dpfed
