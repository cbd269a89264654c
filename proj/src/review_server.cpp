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

#include "zsc/review_server.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace zsc {
namespace {

using nlohmann::ordered_json;

ordered_json to_json(const std::vector<LabelProb>& top) {
  auto arr = ordered_json::array();
  for (const auto& lp : top) arr.push_back({{"label", lp.label}, {"prob", lp.prob}});
  return arr;
}

std::string content_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

void send_json(httplib::Response& res, const ordered_json& body) {
  res.status = 200;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(ordered_json{{"error", message}}.dump(), "application/json");
}

}  // namespace

std::optional<std::filesystem::path> resolve_under_root(const std::filesystem::path& root,
                                                        const std::string& request_path) {
  namespace fs = std::filesystem;
  if (request_path.empty() || request_path.find('\0') != std::string::npos) return std::nullopt;
  const fs::path rel(request_path);
  if (rel.is_absolute() || rel.has_root_name()) return std::nullopt;
  for (const auto& part : rel) {
    if (part == "..") return std::nullopt;
  }
  std::error_code ec;
  const fs::path base = fs::weakly_canonical(root, ec);
  if (ec) return std::nullopt;
  const fs::path full = fs::weakly_canonical(base / rel, ec);
  if (ec) return std::nullopt;
  auto [b, f] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (b != base.end()) return std::nullopt;
  return full;
}

struct ReviewServer::Impl {
  ReviewSession& session;
  ServerOptions options;
  httplib::Server server;

  Impl(ReviewSession& s, ServerOptions o) : session(s), options(std::move(o)) { routes(); }

  void routes() {
    // httplib also sets SO_REUSEPORT, which lets a second server share a
    // port that is already taken.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                 sizeof(yes));
    });

    server.Get("/api/sample/next", [this](const httplib::Request& req, httplib::Response& res) {
      const auto annotator = req.get_param_value("annotator");
      if (annotator.empty()) return send_error(res, 400, "annotator parameter required");
      const auto item = session.next(annotator);
      if (!item) {
        res.status = 204;
        return;
      }
      ordered_json j;
      j["id"] = item->id;
      j["image_url"] = item->image_url;
      j["predicted_label"] = item->predicted_label;
      j["top"] = to_json(item->top);
      j["remaining"] = item->remaining;
      send_json(res, j);
    });

    server.Post("/api/verdict", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = ordered_json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "malformed JSON");
      VerdictSubmission s;
      for (auto [key, field] : {std::pair{"id", &s.id},
                                std::pair{"predicted_label", &s.predicted_label},
                                std::pair{"verdict", &s.verdict},
                                std::pair{"annotator", &s.annotator}}) {
        auto it = body.find(key);
        if (it == body.end() || !it->is_string()) {
          return send_error(res, 400, std::string("missing string field '") + key + "'");
        }
        *field = it->get<std::string>();
      }
      switch (session.submit(s)) {
        case SubmitStatus::kAccepted:
        case SubmitStatus::kDuplicate:
          res.status = 204;
          return;
        case SubmitStatus::kUnknownId:
          return send_error(res, 404, "unknown sample id '" + s.id + "'");
        case SubmitStatus::kInvalid:
          return send_error(res, 400, "invalid verdict");
      }
    });

    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      const auto p = session.progress();
      auto per_class = ordered_json::array();
      for (const auto& c : p.per_class) {
        per_class.push_back({{"label", c.label}, {"labeled", c.labeled}, {"total", c.total}});
      }
      send_json(res, {{"labeled", p.labeled}, {"total", p.total}, {"per_class", per_class}});
    });

    server.Get("/api/report", [this](const httplib::Request&, httplib::Response& res) {
      const auto r = session.report();
      ordered_json j;
      j["judged"] = r.judged;
      auto per_class = ordered_json::array();
      if (r.accuracy) {
        for (const auto& c : r.accuracy->classes) {
          per_class.push_back({{"label", c.label},
                               {"hits", c.hits},
                               {"judged", c.judged},
                               {"accuracy", c.accuracy}});
        }
      }
      j["per_class"] = per_class;
      j["average"] = r.accuracy ? ordered_json(r.accuracy->average) : ordered_json(nullptr);
      j["mean_hit"] = r.means ? ordered_json(r.means->mean_hit) : ordered_json(nullptr);
      j["mean_miss"] = r.means ? ordered_json(r.means->mean_miss) : ordered_json(nullptr);
      send_json(res, j);
    });

    server.Get(R"(/images/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto path = resolve_under_root(options.image_root, req.matches[1].str());
      if (!path) return send_error(res, 403, "path rejected");
      std::ifstream in(*path, std::ios::binary);
      if (!in || !std::filesystem::is_regular_file(*path)) {
        return send_error(res, 404, "no such image");
      }
      std::ostringstream bytes;
      bytes << in.rdbuf();
      res.status = 200;
      res.set_content(bytes.str(), content_type_for(*path));
    });

    if (!options.static_dir.empty()) {
      server.set_mount_point("/", options.static_dir.string());
    }

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            send_error(res, 500, e.what());
          } catch (...) {
            send_error(res, 500, "internal error");
          }
        });
  }
};

ReviewServer::ReviewServer(ReviewSession& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {}

ReviewServer::~ReviewServer() { stop(); }

bool ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

bool ReviewServer::listen() { return impl_->server.listen_after_bind(); }

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ReviewServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace zsc
