#include "ectaks/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>

#include <CLI11.hpp>

#include "ectaks/attack.hpp"
#include "ectaks/authority.hpp"
#include "ectaks/curve_search.hpp"
#include "ectaks/io.hpp"
#include "ectaks/session.hpp"

namespace ectaks::cli {

namespace fs = std::filesystem;
using io::Json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownPeer:
    case ErrorCode::InvalidShare:
    case ErrorCode::BadTag:
    case ErrorCode::MalformedMessage:
    case ErrorCode::ClusterNotFormed:
      return kExitReject;
    case ErrorCode::InfeasibleConstraint:
    case ErrorCode::NotInSubgroup:
    case ErrorCode::OracleRefused:
    case ErrorCode::ZeroSessionKey:
    case ErrorCode::ClusterConflict:
      return kExitInfeasible;
    default:
      return kExitValidation;
  }
}

namespace {

struct SeedOption {
  u64 value = 0;
  std::vector<CLI::Option*> options;

  void attach(CLI::App* app) { options.push_back(app->add_option("--seed", value, "RNG seed (default: $ECTAKS_SEED)")); }

  bool given() const {
    return std::any_of(options.begin(), options.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }

  u64 resolve() const {
    if (given()) return value;
    if (const char* env = std::getenv("ECTAKS_SEED")) {
      try {
        std::size_t used = 0;
        const u64 v = std::stoull(env, &used);
        if (used == std::string_view(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw Error(ErrorCode::InvalidParameter, std::string("ECTAKS_SEED is not an integer: '") + env + "'");
    }
    std::random_device rd;
    return (static_cast<u64>(rd()) << 32) | rd();
  }
};

Bytes read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const fs::path& path, ByteView bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

bool printable(ByteView bytes) {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t c) { return c >= 0x20 && c < 0x7f; });
}

fs::path node_path(const fs::path& dir, NodeId i) { return dir / "nodes" / ("node_" + std::to_string(i) + ".json"); }

Json write_network(const fs::path& dir, const CaState& state) {
  io::write_json(dir / "ca_state.json", io::to_json(state));
  io::write_json(dir / "public.json", io::public_directory_json(export_public_directory(state)));
  Json files = Json::array({(dir / "ca_state.json").string(), (dir / "public.json").string()});
  for (const auto& [i, lcd] : state.lcds) {
    io::write_json(node_path(dir, i), io::node_file_json(state.curve, lcd));
    files.push_back(node_path(dir, i).string());
  }
  return files;
}

CaState load_state(const fs::path& path) { return io::state_from_json(io::read_json(path)); }

Json handshake_json(const CurveParams& curve, const Lcd& initiator, const Lcd& responder, Rng& rng,
                    std::optional<u64> alpha) {
  const Initiation init = alpha ? initiate_with(curve, initiator, responder.node, *alpha)
                                : initiate(curve, initiator, responder.node, rng);
  const Ectak answer = respond(curve, responder, init.share);
  const bool agree = answer == init.ectak && !answer.point.is_identity();
  return Json{{"initiator", initiator.node},
              {"responder", responder.node},
              {"status", agree ? "agree" : "disagree"},
              {"initiator_ectak", io::to_json(init.ectak.point)},
              {"responder_ectak", io::to_json(answer.point)}};
}

Json open_json(const CurveParams& curve, const Lcd& lcd, ByteView wire, Bytes* plaintext) {
  try {
    const WireMessage msg = decode(curve, wire);
    Bytes pt = open(curve, lcd, msg);
    Json out{{"status", "accept"}, {"sender", msg.sender}, {"recipient", msg.recipient}, {"plaintext_hex", hex(pt)}};
    if (printable(pt)) out["plaintext"] = std::string(pt.begin(), pt.end());
    if (plaintext) *plaintext = std::move(pt);
    return out;
  } catch (const Error& e) {
    return Json{{"status", "reject"}, {"reason", std::string(to_string(e.code()))}, {"detail", e.what()}};
  }
}

Json sp_report(u64 p, u64 trials, u64 seed, unsigned threads, bool* census_ok) {
  const SpEstimate est = estimate_sp(p, trials, seed, threads);
  Json out{{"seed", seed}, {"estimate", io::to_json(est)}};
  if (p <= 3) {
    const SpCensus census = exact_sp_small(p);
    const double exact = census.fraction();
    const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials));
    const double z = sigma == 0 ? 0.0 : (est.estimate - exact) / sigma;
    const bool ok = std::abs(est.estimate - exact) <= 3 * sigma;
    out["census"] = io::to_json(census);
    out["census_check"] = Json{{"exact", exact}, {"sigma", sigma}, {"z", z}, {"within_3_sigma", ok}};
    if (census_ok) *census_ok = ok;
  }
  return out;
}

Json recover_json(const CaState& state, NodeId target, const std::set<NodeId>& compromised, Rng& rng) {
  if (state.curve.p > kEcdlGuard) {
    throw Error(ErrorCode::OracleRefused, "subgroup order " + std::to_string(state.curve.p) +
                                              " exceeds the brute-force guard " + std::to_string(kEcdlGuard));
  }
  const RecoveryReport report = recover_secret(state, target, compromised, brute_force_oracle(), rng);
  Json out = io::to_json(report);
  out["oracle"] = "brute-force";
  out["ecdl_guard"] = kEcdlGuard;
  bool clustered = false;
  for (const auto& c : state.clusters) {
    if (c.master == target || c.members.contains(target)) clustered = true;
    for (NodeId j : compromised) clustered = clustered || c.master == j || c.members.contains(j);
  }
  if (clustered) {
    out["open_experiment"] = "a cluster's common gamma touches this attack; its effect on recovery is not analyzed";
  }
  return out;
}

std::set<NodeId> to_set(const std::vector<NodeId>& v) { return {v.begin(), v.end()}; }

// --- scenario runner ---

Json run_scenario(const fs::path& path, std::optional<u64> seed_override, const std::optional<fs::path>& out_dir) {
  const Json scenario = io::read_json(path);
  const fs::path base = path.parent_path();
  auto need = [&](const Json& j, const char* key) -> const Json& {
    if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::MalformedFile, std::string("scenario: missing '") + key + "'");
    return j.at(key);
  };
  const CurveParams curve = io::curve_from_json(io::read_json(base / need(scenario, "curve").get<std::string>()));
  const io::TopologyFile topo = io::topology_from_json(io::read_json(base / need(scenario, "topology").get<std::string>()));
  const u64 seed = seed_override ? *seed_override : need(scenario, "seed").get<u64>();
  Rng rng(seed);
  std::optional<CaState> state;
  auto provisioned = [&]() -> CaState& {
    if (!state) throw Error(ErrorCode::PrerequisiteMissing, "scenario: provision must run first");
    return *state;
  };
  auto node = [&](const Json& j, const char* key) {
    const NodeId id = need(j, key).get<NodeId>();
    provisioned().lcd(id);
    return id;
  };
  auto nodes = [&](const Json& j, const char* key) {
    std::set<NodeId> ids;
    for (const auto& v : need(j, key)) ids.insert(v.get<NodeId>());
    return ids;
  };

  Json log = Json::array();
  for (const auto& action : need(scenario, "actions")) {
    const std::string op = need(action, "action").get<std::string>();
    Json entry{{"action", op}};
    if (op == "provision") {
      state = provision(topo.ant, curve, rng, {topo.roots});
      entry["nodes"] = state->lcds.size();
    } else if (op == "handshake") {
      const CaState& s = provisioned();
      entry["result"] = handshake_json(curve, s.lcd(node(action, "initiator")), s.lcd(node(action, "responder")), rng,
                                       std::nullopt);
    } else if (op == "seal") {
      const CaState& s = provisioned();
      const NodeId from = node(action, "from");
      const NodeId to = node(action, "to");
      const std::string text = need(action, "message").get<std::string>();
      const WireMessage msg = seal(curve, s.lcd(from), to, as_bytes(text), rng);
      entry["result"] = open_json(curve, s.lcd(to), encode(curve, msg), nullptr);
    } else if (op == "replace") {
      const NodeId i = node(action, "node");
      replace_node(provisioned(), i);
      entry["replacements"] = provisioned().replacements[i];
    } else if (op == "admit") {
      const NodeId j = need(action, "node").get<NodeId>();
      admit_node(provisioned(), j, nodes(action, "neighbors"), rng);
      entry["node"] = j;
    } else if (op == "form-cluster") {
      const NodeId m = node(action, "master");
      form_cluster(provisioned(), m, nodes(action, "members"), rng);
      entry["gamma"] = provisioned().cluster_of(m)->gamma;
    } else if (op == "attack") {
      entry["result"] = recover_json(provisioned(), node(action, "target"), nodes(action, "compromised"), rng);
    } else if (op == "estimate-sp") {
      entry["result"] = sp_report(need(action, "p").get<u64>(), need(action, "trials").get<u64>(), rng.next(), 0, nullptr);
    } else {
      throw Error(ErrorCode::MalformedFile, "scenario: unknown action '" + op + "'");
    }
    log.push_back(entry);
  }
  Json out{{"seed", seed}, {"log", log}};
  if (out_dir && state) out["files"] = write_network(*out_dir, *state);
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ECTAKS toolkit: provisioning, handshakes, sealed messages and attack experiments", "ectaks"};
  app.require_subcommand(1);
  std::function<int()> action;
  auto emit = [&](const Json& j) { out << io::dump(j); };

  // curve search
  auto* curve_cmd = app.add_subcommand("curve", "Curve utilities")->require_subcommand(1);
  auto* search = curve_cmd->add_subcommand("search", "Find toy curves with prime-order subgroups");
  CurveSearchOptions search_opts;
  fs::path search_out;
  search->add_option("--max-q", search_opts.max_q, "Largest field prime")->required();
  search->add_option("--min-q", search_opts.min_q, "Smallest field prime");
  search->add_option("--min-p", search_opts.min_p, "Smallest subgroup order");
  search->add_option("--max-p", search_opts.max_p, "Largest subgroup order");
  search->add_option("--out", search_out, "Output directory")->required();
  search->callback([&] {
    action = [&] {
      Json found = Json::array();
      for (const auto& c : find_toy_curves(search_opts)) {
        const fs::path file = search_out / ("curve_q" + std::to_string(c.q) + "_p" + std::to_string(c.p) + ".json");
        io::write_json(file, io::to_json(c));
        found.push_back(Json{{"file", file.string()}, {"q", c.q}, {"p", c.p}});
      }
      fs::create_directories(search_out);
      emit(Json{{"curves", found}});
      return kExitOk;
    };
  });

  // provision
  auto* prov = app.add_subcommand("provision", "Assign LCDs to every node of a topology");
  fs::path topo_path, curve_path, out_dir;
  SeedOption seed;
  prov->add_option("--topology", topo_path, "Topology file")->required();
  prov->add_option("--curve", curve_path, "Curve file")->required();
  prov->add_option("--out", out_dir, "Output directory")->required();
  seed.attach(prov);
  prov->callback([&] {
    action = [&] {
      const CurveParams curve = io::curve_from_json(io::read_json(curve_path));
      const io::TopologyFile topo = io::topology_from_json(io::read_json(topo_path));
      const u64 s = seed.resolve();
      Rng rng(s);
      const CaState state = provision(topo.ant, curve, rng, {topo.roots});
      emit(Json{{"seed", s}, {"nodes", state.lcds.size()}, {"files", write_network(out_dir, state)}});
      return kExitOk;
    };
  });

  // handshake
  auto* hs = app.add_subcommand("handshake", "Run the key agreement between two nodes");
  fs::path lcd_path, peer_path, state_path;
  u64 alpha = 0;
  auto* lcd_opt = hs->add_option("--lcd", lcd_path, "Initiator node file");
  auto* peer_opt = hs->add_option("--peer", peer_path, "Responder node file");
  auto* alpha_opt = hs->add_option("--alpha", alpha, "Ephemeral scalar (default: drawn from the seed)");
  auto* sweep_opt = hs->add_option("--state", state_path, "CA state: sweep every arrow of the network");
  seed.attach(hs);
  lcd_opt->needs(peer_opt);
  peer_opt->needs(lcd_opt);
  sweep_opt->excludes(lcd_opt)->excludes(peer_opt)->excludes(alpha_opt);
  hs->callback([&] {
    action = [&] {
      Rng rng(seed.resolve());
      std::optional<u64> a;
      if (alpha_opt->count() > 0) a = alpha;
      if (sweep_opt->count() > 0) {
        const CaState state = load_state(state_path);
        Json results = Json::array();
        std::size_t agreed = 0;
        for (const auto& [i, j] : state.topology.arrows) {
          Json r = handshake_json(state.curve, state.lcd(i), state.lcd(j), rng, std::nullopt);
          agreed += r["status"] == "agree";
          results.push_back(std::move(r));
        }
        emit(Json{{"arrows", results.size()}, {"agree", agreed}, {"results", results}});
        return agreed == results.size() ? kExitOk : kExitReject;
      }
      if (lcd_opt->count() == 0) throw Error(ErrorCode::InvalidParameter, "need --lcd and --peer, or --state");
      const io::NodeFile a_file = io::node_file_from_json(io::read_json(lcd_path));
      const io::NodeFile b_file = io::node_file_from_json(io::read_json(peer_path));
      if (a_file.curve != b_file.curve) throw Error(ErrorCode::ParameterMismatch, "node files use different curves");
      const Json r = handshake_json(a_file.curve, a_file.lcd, b_file.lcd, rng, a);
      emit(r);
      return r["status"] == "agree" ? kExitOk : kExitReject;
    };
  });

  // seal
  auto* seal_cmd = app.add_subcommand("seal", "Encrypt and authenticate a message for a neighbor or a cluster");
  NodeId to = 0;
  std::string message;
  fs::path in_path, msg_out;
  std::vector<NodeId> members;
  seal_cmd->add_option("--lcd", lcd_path, "Sender node file")->required();
  auto* to_opt = seal_cmd->add_option("--to", to, "Recipient node id");
  auto* members_opt = seal_cmd->add_option("--members", members, "Broadcast to these cluster members")->delimiter(',');
  to_opt->excludes(members_opt);
  auto* text_opt = seal_cmd->add_option("--message", message, "Plaintext");
  auto* in_opt = seal_cmd->add_option("--in", in_path, "Plaintext file");
  text_opt->excludes(in_opt);
  seal_cmd->add_option("--out", msg_out, "Wire message file")->required();
  seed.attach(seal_cmd);
  seal_cmd->callback([&] {
    action = [&] {
      const io::NodeFile node = io::node_file_from_json(io::read_json(lcd_path));
      Bytes plaintext;
      if (in_opt->count() > 0) {
        plaintext = read_bytes(in_path);
      } else {
        const ByteView text = as_bytes(message);
        plaintext.assign(text.begin(), text.end());
      }
      Rng rng(seed.resolve());
      WireMessage msg;
      if (members_opt->count() > 0) {
        msg = multipoint_seal(node.curve, node.lcd, to_set(members), plaintext, rng);
      } else if (to_opt->count() > 0) {
        msg = seal(node.curve, node.lcd, to, plaintext, rng);
      } else {
        throw Error(ErrorCode::InvalidParameter, "need --to or --members");
      }
      const Bytes wire = encode(node.curve, msg);
      write_bytes(msg_out, wire);
      emit(Json{{"status", "sealed"}, {"sender", msg.sender}, {"recipient", msg.recipient}, {"bytes", wire.size()}});
      return kExitOk;
    };
  });

  // open
  auto* open_cmd = app.add_subcommand("open", "Verify and decrypt a wire message");
  fs::path plain_out;
  open_cmd->add_option("--lcd", lcd_path, "Recipient node file")->required();
  open_cmd->add_option("--in", in_path, "Wire message file")->required();
  auto* plain_opt = open_cmd->add_option("--out", plain_out, "Write the plaintext here");
  open_cmd->callback([&] {
    action = [&] {
      const io::NodeFile node = io::node_file_from_json(io::read_json(lcd_path));
      Bytes plaintext;
      const Json r = open_json(node.curve, node.lcd, read_bytes(in_path), &plaintext);
      if (r["status"] != "accept") {
        emit(r);
        return kExitReject;
      }
      if (plain_opt->count() > 0) write_bytes(plain_out, plaintext);
      emit(r);
      return kExitOk;
    };
  });

  // lifecycle
  NodeId node_id = 0;
  std::vector<NodeId> neighbors;
  auto* repl = app.add_subcommand("replace", "Issue the LCD of a node to a replacement device");
  repl->add_option("--state", state_path, "CA state file")->required();
  repl->add_option("--node", node_id, "Node id")->required();
  repl->add_option("--out", out_dir, "Output directory")->required();
  repl->callback([&] {
    action = [&] {
      CaState state = load_state(state_path);
      const Lcd before = state.lcd(node_id);
      const Lcd issued = replace_node(state, node_id);
      emit(Json{{"node", node_id},
                {"replacements", state.replacements[node_id]},
                {"lcd_unchanged", issued == before},
                {"files", write_network(out_dir, state)}});
      return kExitOk;
    };
  });

  auto* admit = app.add_subcommand("admit", "Add node n+1 to a provisioned network");
  admit->add_option("--state", state_path, "CA state file")->required();
  admit->add_option("--node", node_id, "New node id")->required();
  admit->add_option("--neighbors", neighbors, "Existing neighbors")->delimiter(',');
  admit->add_option("--out", out_dir, "Output directory")->required();
  seed.attach(admit);
  admit->callback([&] {
    action = [&] {
      CaState state = load_state(state_path);
      const u64 s = seed.resolve();
      Rng rng(s);
      admit_node(state, node_id, to_set(neighbors), rng);
      emit(Json{{"seed", s}, {"node", node_id}, {"files", write_network(out_dir, state)}});
      return kExitOk;
    };
  });

  auto* cluster_cmd = app.add_subcommand("cluster", "Point-to-multipoint groups")->require_subcommand(1);
  auto* form = cluster_cmd->add_subcommand("form", "Form or extend the cluster of a master node");
  NodeId master = 0;
  form->add_option("--state", state_path, "CA state file")->required();
  form->add_option("--master", master, "Master node id")->required();
  form->add_option("--members", members, "Member ids")->delimiter(',')->required();
  form->add_option("--out", out_dir, "Output directory")->required();
  seed.attach(form);
  form->callback([&] {
    action = [&] {
      CaState state = load_state(state_path);
      const u64 s = seed.resolve();
      Rng rng(s);
      form_cluster(state, master, to_set(members), rng);
      const Cluster* c = state.cluster_of(master);
      emit(Json{{"seed", s},
                {"master", master},
                {"members", c->members},
                {"gamma", c->gamma},
                {"files", write_network(out_dir, state)}});
      return kExitOk;
    };
  });

  // attacks
  auto* attack = app.add_subcommand("attack", "Attack laboratory")->require_subcommand(1);
  auto* recover = attack->add_subcommand("recover", "Recover a target's secret from compromised neighbors");
  NodeId target = 0;
  std::vector<NodeId> compromised;
  std::string oracle = "brute-force";
  fs::path report_out;
  recover->add_option("--state", state_path, "CA state file")->required();
  recover->add_option("--target", target, "Target node id")->required();
  recover->add_option("--compromised", compromised, "Compromised neighbor ids")->delimiter(',')->required();
  recover->add_option("--oracle", oracle, "ECDL oracle")->check(CLI::IsMember({"brute-force"}));
  auto* report_opt = recover->add_option("--out", report_out, "Report file");
  seed.attach(recover);
  recover->callback([&] {
    action = [&] {
      const CaState state = load_state(state_path);
      const u64 s = seed.resolve();
      Rng rng(s);
      Json r = recover_json(state, target, to_set(compromised), rng);
      r["seed"] = s;
      if (report_opt->count() > 0) io::write_json(report_out, r);
      emit(r);
      return kExitOk;
    };
  });

  auto* sp = attack->add_subcommand("estimate-sp", "Monte Carlo estimate of the attack success probability");
  u64 sp_p = 0, trials = 0;
  unsigned threads = 0;
  sp->add_option("--p", sp_p, "Prime field order")->required();
  sp->add_option("--trials", trials, "Number of trials")->required()->check(CLI::PositiveNumber);
  sp->add_option("--threads", threads, "Worker threads (0: hardware)");
  auto* sp_out_opt = sp->add_option("--out", report_out, "Report file");
  seed.attach(sp);
  sp->callback([&] {
    action = [&] {
      bool census_ok = true;
      const Json r = sp_report(sp_p, trials, seed.resolve(), threads, &census_ok);
      if (sp_out_opt->count() > 0) io::write_json(report_out, r);
      emit(r);
      return census_ok ? kExitOk : kExitInfeasible;
    };
  });

  // scenario
  auto* scen = app.add_subcommand("run", "Execute a scenario file");
  fs::path scenario_path;
  scen->add_option("--scenario", scenario_path, "Scenario file")->required();
  auto* scen_out = scen->add_option("--out", out_dir, "Write the final network here");
  seed.attach(scen);
  scen->callback([&] {
    action = [&] {
      std::optional<u64> s;
      if (seed.given()) s = seed.value;
      std::optional<fs::path> dir;
      if (scen_out->count() > 0) dir = out_dir;
      emit(run_scenario(scenario_path, s, dir));
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: MalformedFile: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ectaks::cli
