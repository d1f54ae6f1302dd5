#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "labelforge/clock.hpp"
#include "labelforge/review.hpp"

namespace httplib {
class Server;
}

namespace labelforge {

struct ReviewServerOptions {
  std::string queue_path;
  std::string matrix_path;  ///< analysis export for GET /api/matrix; may be empty
  std::string static_dir;   ///< UI assets mounted at /; may be empty
  Clock* clock = nullptr;   ///< decision timestamps; system clock when null
};

/// HTTP API over a review queue file. Every state change is written to
/// the queue file before the response goes out.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewServerOptions options);
  ~ReviewServer();

  /// Binds to an ephemeral port when `port` is 0. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void serve();
  void stop();
  bool running() const;

  ReviewQueue snapshot() const;

 private:
  void routes();

  ReviewServerOptions options_;
  SystemClock system_clock_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mutex_;
  ReviewQueue queue_;
};

}  // namespace labelforge
