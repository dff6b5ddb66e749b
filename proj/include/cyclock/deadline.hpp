#pragma once

#include <chrono>
#include <limits>

namespace cyclock {

class Deadline {
public:
	using Clock = std::chrono::steady_clock;

	static Deadline never() { return Deadline(Clock::time_point::max()); }
	/// Non-positive or infinite seconds mean no deadline.
	static Deadline after(double seconds) {
		if (!(seconds > 0) || seconds >= 1e9) return never();
		return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds)));
	}
	static Deadline earliest(Deadline a, Deadline b) { return a.at_ < b.at_ ? a : b; }

	bool expired() const { return at_ != Clock::time_point::max() && Clock::now() >= at_; }
	bool is_never() const { return at_ == Clock::time_point::max(); }
	double remaining() const {
		if (is_never()) return std::numeric_limits<double>::infinity();
		return std::chrono::duration<double>(at_ - Clock::now()).count();
	}

private:
	explicit Deadline(Clock::time_point t) : at_(t) {}
	Clock::time_point at_;
};

class Stopwatch {
public:
	Stopwatch() : start_(std::chrono::steady_clock::now()) {}
	double seconds() const {
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
	}

private:
	std::chrono::steady_clock::time_point start_;
};

} // namespace cyclock
