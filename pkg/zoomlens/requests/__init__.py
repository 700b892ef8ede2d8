from .post import Post, post, listen, stop_listening, stop_listening_to_all
