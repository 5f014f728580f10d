#pragma once

#include <span>
#include <string>
#include <vector>

namespace alma {

struct HostSpec {
  std::string host_id;
  double cpu_capacity = 0.0;  // vCPUs
  double mem_capacity = 0.0;  // MB
};

struct VMSpec {
  std::string vm_id;
  double vcpus = 0.0;
  double mem = 0.0;  // MB
  std::string current_host;
};

struct MigrationRequest {
  std::string vm_id;
  std::string source_host;
  std::string target_host;
  double submitted_at = 0.0;

  bool operator==(const MigrationRequest&) const = default;
};

/// First-fit-decreasing consolidation.
///
/// Hosts are ranked by memory in use (most loaded first). The planner keeps
/// the smallest prefix of that ranking that can absorb every VM from the
/// remaining hosts, packing those VMs largest-memory-first onto the first
/// retained host with room for both their memory and vCPUs. VMs already on
/// a retained host stay put and produce no request.
///
/// Throws PlanningError naming every VM that fits on no host at all.
std::vector<MigrationRequest> plan(std::span<const HostSpec> hosts,
                                   std::span<const VMSpec> vms, double submitted_at);

}  // namespace alma
