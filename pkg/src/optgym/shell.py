"""Interactive shell: drive an environment without writing any code.

Every command has inline documentation (``help <command>``); readline tab
completion is enabled where the host Python provides it.
"""

from __future__ import annotations

import cmd

import optgym


class OptGymShell(cmd.Cmd):
    intro = "optgym interactive shell. Type help or ? to list commands.\n"
    prompt = "optgym> "

    def __init__(self, env, **kwargs):
        super().__init__(**kwargs)
        self.env = env
        self._print_banner()

    def _print_banner(self) -> None:
        print(f"environment: {self.env.env_id}")
        print(f"benchmark:   {self.env.benchmark}")
        space = self.env.action_space
        print(f"actions:     {space.n} ({', '.join(self.env.action_names[:8])}"
              f"{', ...' if space.n > 8 else ''})")
        print("call `reset` to start an episode.")

    # ------------------------------------------------------------------
    def do_reset(self, arg: str):
        """reset [benchmark-uri] -- start a new episode, optionally rebinding."""
        value = self.env.reset(arg.strip() or None)
        print(f"episode {self.env.episode_count} started; digest {self.env.state_digest[:12]}")
        if value is not None:
            print(f"observation: {value}")

    def do_step(self, arg: str):
        """step <action> [action ...] -- apply actions by name or index."""
        if not self.env.in_episode:
            print("no live episode; run `reset` first")
            return
        tokens = arg.split()
        if not tokens:
            print("usage: step <action> [action ...]")
            return
        actions = [int(t) if t.isdigit() else t for t in tokens]
        try:
            reply = self.env.step(actions)
        except optgym.OptGymError as e:
            print(f"error [{e.code}]: {e.message}")
            return
        rewards = ", ".join(f"{r:+.4g}" for r in reply.rewards) or "none"
        print(f"reward: {rewards} | cumulative: {self.env.cumulative_reward:+.4g}"
              f" | done: {reply.done}")
        if reply.info:
            print(f"info: {reply.info}")

    def complete_step(self, text, line, begidx, endidx):
        return [name for name in self.env.action_names if name.startswith(text)]

    def do_actions(self, arg: str):
        """actions -- list the discrete actions of this environment."""
        for i, name in enumerate(self.env.action_names):
            print(f"{i:4d}  {name}")

    def do_spaces(self, arg: str):
        """spaces -- list observation and reward spaces."""
        print("observation spaces:")
        for d in self.env.observation_spaces:
            print(f"  {d.id} ({d.kind})")
        print("reward spaces:")
        for d in self.env.reward_spaces:
            print(f"  {d.id}")

    def do_observe(self, arg: str):
        """observe <space-id> -- fetch one observation without stepping."""
        space_id = arg.strip()
        if not space_id:
            print("usage: observe <space-id>")
            return
        if not self.env.in_episode:
            print("no live episode; run `reset` first")
            return
        try:
            value = self.env.observe(space_id)
        except optgym.OptGymError as e:
            print(f"error [{e.code}]: {e.message}")
            return
        print(value)

    def complete_observe(self, text, line, begidx, endidx):
        return [d.id for d in self.env.observation_spaces if d.id.startswith(text)]

    def do_state(self, arg: str):
        """state -- show the current episode state."""
        state = self.env.serialize_state()
        print(f"benchmark:  {state.benchmark}")
        print(f"actions:    {state.actions}")
        print(f"cumulative: {state.cumulative_reward:+.6g}")
        print(f"digest:     {state.state_digest}")

    def do_save(self, arg: str):
        """save <path> -- write the current state as a replayable JSON file."""
        path = arg.strip()
        if not path:
            print("usage: save <path>")
            return
        self.env.serialize_state().save(path)
        print(f"saved {path}")

    def do_benchmarks(self, arg: str):
        """benchmarks [dataset] -- list datasets, or the first members of one."""
        import itertools

        name = arg.strip()
        if not name:
            for ds in self.env.datasets.list(self.env.env_id):
                print(f"{ds.name:24s} size={ds.size}")
            return
        for uri in itertools.islice(self.env.datasets.benchmarks(name), 20):
            print(uri)

    def do_exit(self, arg: str):
        """exit -- leave the shell."""
        return True

    do_quit = do_exit
    do_EOF = do_exit


def run_shell(env_spec: str, benchmark: str, **make_kwargs) -> None:
    spec = optgym.environment_spec(env_spec)
    env = optgym.make(
        env_spec, benchmark, reward_space=spec.reward_spaces[0].id, **make_kwargs
    )
    try:
        OptGymShell(env).cmdloop()
    finally:
        env.close()
