/*
Copyright (c) 2026 The ripple-gnn Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ripple {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class out_of_range_error : public error {
public:
  using error::error;
};

class duplicate_edge_error : public error {
public:
  using error::error;
};

class missing_edge_error : public error {
public:
  using error::error;
};

class dim_mismatch_error : public error {
public:
  using error::error;
};

class format_error : public error {
public:
  using error::error;
};

// Text-format failure; line is 1-based.
class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class invalid_batch_error : public error {
public:
  invalid_batch_error(std::size_t index, const std::string& reason)
      : error("record " + std::to_string(index) + ": " + reason), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

class insufficient_edges_error : public error {
public:
  using error::error;
};

class coverage_error : public error {
public:
  using error::error;
};

class config_error : public error {
public:
  using error::error;
};

class peer_disconnected_error : public error {
public:
  using error::error;
};

} // namespace ripple
