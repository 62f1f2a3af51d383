#include "chedra/service.hpp"

#include "chedra/error.hpp"
#include "chedra/io.hpp"
#include "chedra/validation.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <variant>

namespace chedra {

namespace {

using nlohmann::json;

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string quote(std::string_view s) { return json(std::string(s)).dump(); }

HttpResponse error_response(int status, std::string_view code, const std::string& message,
                            const std::string& extra = {}) {
  std::string body = "{\"error\":" + quote(code) + ",\"message\":" + quote(message);
  body += extra;
  body += '}';
  return {status, body};
}

int status_for(Errc code) {
  switch (code) {
    case Errc::SchemaError:
    case Errc::InvariantError:
    case Errc::NonSimpleFan:
    case Errc::ShapeMismatch:
      return 400;
    default:
      return 422;
  }
}

HttpResponse from_error(const Error& e) { return error_response(status_for(e.code()), to_string(e.code()), e.message()); }

std::string classification_json(const Classification& c) {
  std::string out = "{\"label\":" + quote(to_string(c.label));
  out += ",\"branch\":" + quote(to_string(c.branch));
  out += std::string(",\"flexible\":") + (c.flexible() ? "true" : "false");
  out += std::string(",\"also_case3\":") + (c.also_case3 ? "true" : "false");
  out += ",\"max_coeff_residual\":" + format_number(c.max_coeff_residual);
  out += ",\"worst_index\":" + (c.worst_index ? std::to_string(*c.worst_index) : std::string("null"));
  out += ",\"coeff_residuals\":[";
  for (std::size_t i = 0; i < c.coeff_residuals.size(); ++i) {
    if (i) out += ',';
    out += format_number(c.coeff_residuals[i]);
  }
  out += "],\"reason\":" + quote(c.reason) + "}";
  return out;
}

std::string ranges_json(const std::vector<RangeInterval>& ranges) {
  std::string out = "[";
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const RangeInterval& r = ranges[i];
    if (i) out += ',';
    out += "{\"lo\":" + format_number(r.lo) + ",\"hi\":" + format_number(r.hi) +
           ",\"lo_kind\":" + quote(to_string(r.lo_kind)) + ",\"hi_kind\":" + quote(to_string(r.hi_kind)) + "}";
  }
  out += ']';
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::optional<double> nearest_admissible(const std::vector<RangeInterval>& ranges, double a) {
  std::optional<double> best;
  for (const RangeInterval& r : ranges) {
    const double c = std::clamp(a, r.lo, r.hi);
    if (!best || std::abs(c - a) < std::abs(*best - a)) best = c;
  }
  return best;
}

HttpResponse out_of_range(const NetSession& s, double a, const std::string& why) {
  const auto nearest = nearest_admissible(s.net_range, a);
  return error_response(409, "OutOfRange", why,
                        ",\"a\":" + format_number(a) +
                            ",\"nearest\":" + (nearest ? format_number(*nearest) : std::string("null")) +
                            ",\"range\":" + ranges_json(s.net_range));
}

bool on_endpoint(const std::vector<RangeInterval>& ranges, double a) {
  for (const RangeInterval& r : ranges) {
    const double slack = 1e-9 * std::max(1.0, std::abs(a));
    if (std::abs(a - r.lo) <= slack || std::abs(a - r.hi) <= slack) return true;
  }
  return false;
}

// Geometry of a session at parameter a with its validation report.
GeometrySnapshot state_at(const NetSession& s, double a, const Tolerances& tol) {
  GeometrySnapshot g;
  if (s.scales) {
    const FlexionState st = flex_parallel(s.net, *s.scales, a, tol);
    g = snapshot(st);
    ValidationReport rep = check_planarity(st.vertices, tol);
    const ValidationReport iso = check_isometry(s.transferred->intrinsics, st.vertices, tol);
    rep.max_isometry = iso.max_isometry;
    rep.isometry_ok = iso.isometry_ok;
    rep.bad_edges = iso.bad_edges;
    g.report = rep;
  } else {
    const FlexionState st = flex(s.net, a, tol);
    g = snapshot(st);
    g.report = validate_state(s.net, st, tol);
  }
  g.boundary = on_endpoint(s.net_range, a);
  return g;
}

std::string session_json(const NetSession& s, const Tolerances& tol) {
  std::string out = "{\"id\":" + quote(s.id);
  if (!s.master_id.empty()) out += ",\"master_id\":" + quote(s.master_id);
  out += ",\"a_ref\":" + format_number(s.spec.a_ref);
  out += ",\"classification\":" + classification_json(s.classification);
  out += ",\"range\":" + ranges_json(s.net_range);
  out += ",\"linkage_range\":" + ranges_json(s.linkage_range);
  out += ",\"geometry\":" + export_geometry(state_at(s, s.spec.a_ref, tol), GeometryFormat::Json);
  out += '}';
  return out;
}

// Admissible a from the query (defaults to a_ref), or an error response.
std::variant<double, HttpResponse> query_a(const NetSession& s, const QueryParams& query) {
  double a = s.spec.a_ref;
  if (auto it = query.find("a"); it != query.end()) {
    const auto v = parse_double(it->second);
    if (!v) return error_response(400, "SchemaError", "query parameter a must be a finite number");
    a = *v;
  }
  if (!interval_containing(s.net_range, a)) return out_of_range(s, a, "a outside the flexion range");
  return a;
}

}  // namespace

DesignService::DesignService(ServiceConfig config) : config_(std::move(config)) {
  if (config_.max_sessions == 0) config_.max_sessions = 1;
}

std::size_t DesignService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::shared_ptr<const NetSession> DesignService::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second.second);
  return it->second.first;
}

void DesignService::insert(std::shared_ptr<const NetSession> session) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session->id);
  if (it != sessions_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.second);
    return;
  }
  // copy the key first: the pair below takes ownership of `session`
  const std::string id = session->id;
  lru_.push_front(id);
  sessions_.emplace(id, std::make_pair(std::move(session), lru_.begin()));
  while (sessions_.size() > config_.max_sessions) {
    sessions_.erase(lru_.back());
    lru_.pop_back();
  }
}

namespace {

std::shared_ptr<NetSession> make_session(const NetSpec& spec, bool allow_rigid, const Tolerances& tol,
                                         std::optional<HttpResponse>& failure) {
  auto s = std::make_shared<NetSession>();
  s->spec = spec;
  s->id = fnv1a(spec_to_json(spec));
  try {
    const LinkageSpec linkage = resolve_linkage(spec);
    try {
      s->classification = classify(linkage, tol);
    } catch (const Error& e) {
      if (e.code() != Errc::MixedCases) throw;
      s->classification = Classification{};
      s->classification.reason = e.message();
    }
    if (!s->classification.flexible() && !allow_rigid) {
      failure = error_response(422, "NotFlexible", s->classification.reason.empty() ? "linkage is not flexible"
                                                                                   : s->classification.reason,
                               ",\"classification\":" + classification_json(s->classification));
      return nullptr;
    }
    if (spec.cases.size() > 1) {
      s->net = build_pnet(spec, tol);
    } else {
      s->net = build_patch(spec);
    }
    s->linkage_range = flexion_range(linkage, tol);
    s->net_range = net_flexion_range(s->net, tol);
    if (spec.parallel) {
      s->scales = *spec.parallel;
      s->transferred = parallel_transfer(s->net, *spec.parallel);
    }
  } catch (const Error& e) {
    failure = from_error(e);
    return nullptr;
  }
  return s;
}

}  // namespace

HttpResponse DesignService::create_net(const std::string& body, const QueryParams& query) {
  NetSpec spec;
  try {
    spec = parse_spec(body);
  } catch (const Error& e) {
    return error_response(400, to_string(e.code()), e.message());
  }
  const auto flag = query.find("allow_rigid");
  const bool allow_rigid = flag != query.end() && (flag->second == "1" || flag->second == "true");

  const std::string id = fnv1a(spec_to_json(spec));
  std::shared_ptr<const NetSession> session = find(id);
  if (session && !session->classification.flexible() && !allow_rigid) {
    return error_response(422, "NotFlexible", session->classification.reason,
                          ",\"classification\":" + classification_json(session->classification));
  }
  if (!session) {
    std::optional<HttpResponse> failure;
    auto fresh = make_session(spec, allow_rigid, config_.tolerances, failure);
    if (!fresh) return *failure;
    session = fresh;
    insert(session);
  }
  try {
    return {201, session_json(*session, config_.tolerances)};
  } catch (const Error& e) {
    return from_error(e);
  }
}

HttpResponse DesignService::get_net(const std::string& id, const QueryParams& query) {
  const auto s = find(id);
  if (!s) return error_response(404, "NotFound", "unknown net id " + id);
  const auto a = query_a(*s, query);
  if (std::holds_alternative<HttpResponse>(a)) return std::get<HttpResponse>(a);
  try {
    return {200, export_geometry(state_at(*s, std::get<double>(a), config_.tolerances), GeometryFormat::Json)};
  } catch (const Error& e) {
    return out_of_range(*s, std::get<double>(a), e.message());
  }
}

HttpResponse DesignService::get_frames(const std::string& id, const QueryParams& query) {
  const auto s = find(id);
  if (!s) return error_response(404, "NotFound", "unknown net id " + id);
  const auto home = interval_containing(s->net_range, s->spec.a_ref);
  double from = home ? home->lo : s->spec.a_ref;
  double to = home ? home->hi : s->spec.a_ref;
  // Without explicit bounds the frames sit at cell midpoints of the home
  // interval, whose ends are degenerate configurations.
  bool midpoints = true;
  int n = 10;
  if (auto it = query.find("from"); it != query.end()) {
    const auto v = parse_double(it->second);
    if (!v) return error_response(400, "SchemaError", "from must be a finite number");
    from = *v;
    midpoints = false;
  }
  if (auto it = query.find("to"); it != query.end()) {
    const auto v = parse_double(it->second);
    if (!v) return error_response(400, "SchemaError", "to must be a finite number");
    to = *v;
    midpoints = false;
  }
  if (auto it = query.find("n"); it != query.end()) {
    const auto v = parse_double(it->second);
    if (!v || *v != std::floor(*v) || *v < 1 || *v > 10000) {
      return error_response(400, "SchemaError", "n must be an integer in [1, 10000]");
    }
    n = static_cast<int>(*v);
  }
  if (from > to) return error_response(400, "SchemaError", "from must not exceed to");
  std::string out = "[";
  for (int i = 0; i < n; ++i) {
    const double a = midpoints ? from + (to - from) * (i + 0.5) / n
                               : (n == 1 ? from : from + (to - from) * i / (n - 1));
    if (!interval_containing(s->net_range, a)) return out_of_range(*s, a, "frame outside the flexion range");
    try {
      if (i) out += ',';
      out += export_geometry(state_at(*s, a, config_.tolerances), GeometryFormat::Json);
    } catch (const Error& e) {
      return out_of_range(*s, a, e.message());
    }
  }
  out += ']';
  return {200, out};
}

HttpResponse DesignService::create_parallel(const std::string& id, const std::string& body) {
  const auto master = find(id);
  if (!master) return error_response(404, "NotFound", "unknown net id " + id);
  ParallelScales scales;
  try {
    const json doc = json::parse(body);
    if (!doc.is_object() || !doc.contains("row_scales") || !doc.contains("col_scales")) {
      return error_response(400, "SchemaError", "body needs row_scales and col_scales");
    }
    for (const char* key : {"row_scales", "col_scales"}) {
      const json& arr = doc[key];
      if (!arr.is_array()) return error_response(400, "SchemaError", std::string(key) + " must be an array");
      auto& dst = std::string(key) == "row_scales" ? scales.row_scales : scales.col_scales;
      for (const json& v : arr) {
        if (!v.is_number()) return error_response(400, "SchemaError", std::string(key) + " must hold numbers");
        dst.push_back(v.get<double>());
      }
    }
  } catch (const json::exception& e) {
    return error_response(400, "SchemaError", std::string("malformed JSON: ") + e.what());
  }
  if (scales.row_scales.size() + 1 != master->net.vertices.cols() ||
      scales.col_scales.size() + 1 != master->net.vertices.rows()) {
    return error_response(400, "ShapeMismatch", "scale counts do not match the net");
  }

  NetSpec spec = master->spec;
  spec.parallel = scales;
  const std::string new_id = fnv1a(spec_to_json(spec));
  std::shared_ptr<const NetSession> session = find(new_id);
  if (!session) {
    auto s = std::make_shared<NetSession>(*master);
    s->spec = spec;
    s->id = new_id;
    s->master_id = master->master_id.empty() ? master->id : master->master_id;
    s->scales = scales;
    try {
      s->transferred = parallel_transfer(master->net, scales);
    } catch (const Error& e) {
      return error_response(422, to_string(e.code()), e.message());
    }
    session = s;
    insert(session);
  }
  try {
    return {201, session_json(*session, config_.tolerances)};
  } catch (const Error& e) {
    return error_response(422, to_string(e.code()), e.message());
  }
}

HttpResponse DesignService::validate(const std::string& id, const QueryParams& query) {
  const auto s = find(id);
  if (!s) return error_response(404, "NotFound", "unknown net id " + id);
  const auto a = query_a(*s, query);
  if (std::holds_alternative<HttpResponse>(a)) return std::get<HttpResponse>(a);
  try {
    const GeometrySnapshot g = state_at(*s, std::get<double>(a), config_.tolerances);
    std::string out = "{\"a\":" + format_number(g.a) + ",\"boundary\":" + (g.boundary ? "true" : "false") +
                      ",\"report\":" + report_to_json(*g.report) + "}";
    return {200, out};
  } catch (const Error& e) {
    return out_of_range(*s, std::get<double>(a), e.message());
  }
}

struct HttpServer::Impl {
  explicit Impl(DesignService& s) : service(s) {}
  DesignService& service;
  httplib::Server server;
};

namespace {

QueryParams to_query(const httplib::Request& req) {
  QueryParams q;
  for (const auto& [k, v] : req.params) q[k] = v;
  return q;
}

void reply(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

HttpServer::HttpServer(DesignService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  auto& svc = impl_->service;
  svr.set_default_headers({{"Access-Control-Allow-Origin", svc.config().cors_origin},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  svr.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  svr.Post("/api/nets", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.create_net(req.body, to_query(req)));
  });
  svr.Get(R"(/api/nets/([A-Za-z0-9]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_net(req.matches[1], to_query(req)));
  });
  svr.Get(R"(/api/nets/([A-Za-z0-9]+)/frames)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.get_frames(req.matches[1], to_query(req)));
  });
  svr.Post(R"(/api/nets/([A-Za-z0-9]+)/parallel)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.create_parallel(req.matches[1], req.body));
  });
  svr.Get(R"(/api/nets/([A-Za-z0-9]+)/validate)", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.validate(req.matches[1], to_query(req)));
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  if (port == 0) return svr.bind_to_any_port(host);
  return svr.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace chedra
