// Copyright 2026 The ZSC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "zsc/review.hpp"

namespace zsc {

struct ServerOptions {
  std::filesystem::path image_root;
  std::filesystem::path static_dir;  // UI assets served at "/", optional
};

// HTTP front end for a ReviewSession:
//   GET  /api/sample/next?annotator=NAME  200 item | 204 nothing pending for NAME
//   POST /api/verdict                     204 | 400 malformed | 404 unknown id
//   GET  /api/progress
//   GET  /api/report
//   GET  /images/<path>                   files under image_root; 403 on traversal
class ReviewServer {
 public:
  ReviewServer(ReviewSession& session, ServerOptions options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  // Port 0 binds an ephemeral port. False when the address is unavailable.
  bool bind(const std::string& host, int port);
  int port() const noexcept { return port_; }
  // Blocks until stop().
  bool listen();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

// Resolves a request path under root; nullopt for absolute paths, ".."
// segments, or anything that escapes root through symlinks.
std::optional<std::filesystem::path> resolve_under_root(const std::filesystem::path& root,
                                                        const std::string& request_path);

}  // namespace zsc
